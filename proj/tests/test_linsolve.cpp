#include "ddiff/errors.hpp"
#include "ddiff/grid.hpp"
#include "ddiff/linsolve.hpp"
#include "ddiff/stencil.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace ddiff;

namespace {

LinearOperator dense_operator(const std::vector<std::vector<double>>& m, bool symmetric = true)
{
  return LinearOperator(m.size(), [m](std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < m.size(); ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < m.size(); ++j)
        s += m[i][j] * x[j];
      y[i] = s;
    }
  }, symmetric);
}

// Gaussian elimination with partial pivoting; the reference solution.
std::vector<double> dense_solve(std::vector<std::vector<double>> a, std::vector<double> b)
{
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c]))
        piv = r;
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double m = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k)
        a[r][k] -= m * a[c][k];
      b[r] -= m * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t r = n; r-- > 0;) {
    double s = b[r];
    for (std::size_t k = r + 1; k < n; ++k)
      s -= a[r][k] * x[k];
    x[r] = s / a[r][r];
  }
  return x;
}

// Random symmetric positive definite 20 x 20 system with 5-point stencil
// sparsity on a 4 x 5 grid: I + Laplacian with random positive face weights.
std::vector<std::vector<double>> random_stencil_spd(std::mt19937_64& rng)
{
  std::uniform_real_distribution<double> w(0.1, 5.0);
  const std::size_t nx = 4, ny = 5, n = nx * ny;
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  for (std::size_t k = 0; k < n; ++k)
    a[k][k] = w(rng) * 0.2;
  auto couple = [&](std::size_t p, std::size_t q) {
    const double c = w(rng);
    a[p][p] += c;
    a[q][q] += c;
    a[p][q] -= c;
    a[q][p] -= c;
  };
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) {
      if (i + 1 < nx)
        couple(j * nx + i, j * nx + i + 1);
      if (j + 1 < ny)
        couple(j * nx + i, (j + 1) * nx + i);
    }
  return a;
}

} // namespace

TEST_CASE("small systems")
{
  CgOptions opts;
  const std::vector<double> b{3.0, -1.0, 2.0};
  const LinearOperator id(3, [](std::span<const double> x, std::span<double> y) {
    std::copy(x.begin(), x.end(), y.begin());
  });
  const CgResult r = cg_solve(id, b, opts);
  CHECK(r.converged);
  CHECK(r.iters == 1);
  CHECK(r.x == b);

  const CgResult d = cg_solve(dense_operator({{1.0, 0.0}, {0.0, 2.0}}), std::vector<double>{1.0, 2.0}, opts);
  CHECK(d.x[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d.x[1] == doctest::Approx(1.0).epsilon(1e-12));

  const CgResult p = cg_solve(dense_operator({{1.1, -0.1}, {-0.1, 1.1}}), std::vector<double>{2.0, 1.0}, opts);
  CHECK(p.x[0] == doctest::Approx(2.3 / 1.2).epsilon(1e-12));
  CHECK(p.x[1] == doctest::Approx(1.3 / 1.2).epsilon(1e-12));
}

TEST_CASE("rejects a non-symmetric operator")
{
  const LinearOperator op(2, [](std::span<const double>, std::span<double>) {}, false);
  CHECK_THROWS_AS(cg_solve(op, std::vector<double>{1.0, 1.0}, CgOptions{}), InvalidArgument);
}

TEST_CASE("random stencil SPD systems match a dense direct solve")
{
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = random_stencil_spd(rng);
    std::vector<double> b(a.size());
    for (double& v : b)
      v = nd(rng);
    CgOptions opts;
    opts.tol = 1e-12;
    opts.max_iter = 500;
    const CgResult r = cg_solve(dense_operator(a), b, opts);
    REQUIRE(r.converged);
    const std::vector<double> ref = dense_solve(a, b);
    for (std::size_t k = 0; k < b.size(); ++k)
      CHECK(std::abs(r.x[k] - ref[k]) <= 1e-8);
    // The reported residual is the recomputed one.
    const std::vector<double> ax = dense_operator(a)(r.x);
    double res = 0.0;
    for (std::size_t k = 0; k < b.size(); ++k)
      res += (b[k] - ax[k]) * (b[k] - ax[k]);
    CHECK(std::abs(std::sqrt(res) - r.residual) <= 1e-13 * std::max(1.0, r.rhs_norm));
  }
}

TEST_CASE("Jacobi preconditioning reaches the same solution")
{
  std::mt19937_64 rng(5);
  const auto a = random_stencil_spd(rng);
  std::vector<double> b(a.size(), 1.0), diag(a.size());
  for (std::size_t k = 0; k < a.size(); ++k)
    diag[k] = a[k][k];
  CgOptions opts;
  opts.tol = 1e-12;
  opts.max_iter = 500;
  opts.jacobi_diag = diag;
  const CgResult r = cg_solve(dense_operator(a), b, opts);
  const std::vector<double> ref = dense_solve(a, b);
  for (std::size_t k = 0; k < b.size(); ++k)
    CHECK(std::abs(r.x[k] - ref[k]) <= 1e-8);
}

TEST_CASE("stencil operator is linear and symmetric on random probes")
{
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  std::normal_distribution<double> nd;
  const Grid2D g(-1.0, 1.0, 0.0, 1.5, 9, 7);
  FaceCoefficients c = unit_face_coefficients(g);
  for (double& v : c.ax)
    v *= u(rng);
  for (double& v : c.ay)
    v *= u(rng);
  const LinearOperator op(g.size(), [&](std::span<const double> x, std::span<double> y) {
    apply_operator(g, c, 1.0, 0.3, x, y);
  });
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> v(g.size()), w(g.size()), comb(g.size());
    const double a = nd(rng), b = nd(rng);
    for (std::size_t k = 0; k < g.size(); ++k) {
      v[k] = nd(rng);
      w[k] = nd(rng);
      comb[k] = a * v[k] + b * w[k];
    }
    const auto av = op(v), aw = op(w), ac = op(comb);
    for (std::size_t k = 0; k < g.size(); ++k)
      CHECK(std::abs(ac[k] - (a * av[k] + b * aw[k])) <= 1e-12 * std::max(1.0, std::abs(ac[k])));
    const double lhs = dot(av, w), rhs = dot(v, aw);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
  }
}

TEST_CASE("diffusion stencil examples")
{
  const Grid2D g(0.0, 2.0, 0.0, 1.0, 2, 1);
  FaceCoefficients c = unit_face_coefficients(g);
  const auto av = apply_diffusion(g, c, std::vector<double>{2.0, 1.0});
  CHECK(av[0] == 1.0);
  CHECK(av[1] == -1.0);
  const auto constant = apply_diffusion(g, c, std::vector<double>{0.7, 0.7});
  CHECK(constant[0] == 0.0);
  CHECK(constant[1] == 0.0);
  std::fill(c.ax.begin(), c.ax.end(), 0.0);
  const auto zero = apply_diffusion(g, c, std::vector<double>{5.0, -3.0});
  CHECK(zero[0] == 0.0);
  CHECK(zero[1] == 0.0);
}

TEST_CASE("BiCGSTAB on random non-symmetric stencil systems")
{
  std::mt19937_64 rng(23);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> skew(-0.5, 0.5);
  for (int trial = 0; trial < 100; ++trial) {
    auto a = random_stencil_spd(rng);
    // Perturb the off-diagonal couplings only, keeping diagonal dominance.
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < a.size(); ++j)
        if (i != j && a[i][j] != 0.0)
          a[i][j] *= 1.0 + skew(rng);
    std::vector<double> b(a.size());
    for (double& v : b)
      v = nd(rng);
    CgOptions opts;
    opts.tol = 1e-12;
    opts.max_iter = 500;
    const LinearOperator op = dense_operator(a, false);
    const CgResult r = bicgstab_solve(op, b, opts);
    REQUIRE(r.converged);
    const std::vector<double> ref = dense_solve(a, b);
    for (std::size_t k = 0; k < b.size(); ++k)
      CHECK(std::abs(r.x[k] - ref[k]) <= 1e-8);
  }
  const CgResult z = bicgstab_solve(dense_operator({{2.0, 1.0}, {0.0, 1.0}}), std::vector<double>{0.0, 0.0}, CgOptions{});
  CHECK(z.converged);
  CHECK(z.x == std::vector<double>{0.0, 0.0});
}
