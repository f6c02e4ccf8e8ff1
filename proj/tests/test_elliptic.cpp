#include "ddiff/elliptic.hpp"
#include "ddiff/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace ddiff;

TEST_CASE("zero right-hand side")
{
  const Grid2D g = Grid2D::unit_square(6);
  const PoissonSolution s = poisson_neumann(g, std::vector<double>(g.size(), 0.0));
  CHECK(s.energy_sq == 0.0);
  for (double v : s.potential.values())
    CHECK(v == 0.0);
}

TEST_CASE("two-cell Neumann problem")
{
  const Grid2D g(0.0, 2.0, 0.0, 1.0, 2, 1);
  const PoissonSolution s = poisson_neumann(g, std::vector<double>{0.5, -0.5});
  CHECK(s.potential[0] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(s.potential[1] == doctest::Approx(-0.25).epsilon(1e-12));
  CHECK(s.energy_sq == doctest::Approx(0.25).epsilon(1e-12));

  const ScalarField a(g, std::vector<double>{1.5, 0.5});
  const ScalarField b(g, std::vector<double>{1.0, 1.0});
  CHECK(hminus1_sq(a, b) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(hminus1_sq(a, a) == 0.0);
}

TEST_CASE("Laplacian roundtrip recovers a zero-mean field")
{
  std::mt19937_64 rng(21);
  std::normal_distribution<double> nd;
  const Grid2D g(-1.0, 1.0, -0.5, 1.0, 24, 18);
  std::vector<double> w(g.size());
  double m = 0.0;
  for (double& v : w) {
    v = nd(rng);
    m += v;
  }
  m /= static_cast<double>(w.size());
  for (double& v : w)
    v -= m;
  const std::vector<double> rhs = neumann_laplacian(g, w);
  CgOptions opts;
  opts.tol = 1e-13;
  const PoissonSolution s = poisson_neumann(g, rhs, opts);
  double pm = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    CHECK(std::abs(s.potential[k] - w[k]) <= 1e-8);
    pm += s.potential[k];
  }
  CHECK(std::abs(pm / static_cast<double>(w.size())) <= 1e-12);
}

TEST_CASE("H^-1 distance: symmetry, shift invariance, mismatches")
{
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  const Grid2D g = Grid2D::unit_square(16);
  std::vector<double> a(g.size()), b(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    a[k] = u(rng);
    b[k] = u(rng);
  }
  const double ma = mean(ScalarField(g, a)), mb = mean(ScalarField(g, b));
  for (std::size_t k = 0; k < g.size(); ++k) {
    a[k] += 2.0;
    b[k] += 2.0 + ma - mb;
  }
  const ScalarField fa(g, a), fb(g, b);
  const double ab = hminus1_sq(fa, fb), ba = hminus1_sq(fb, fa);
  CHECK(ab > 0.0);
  CHECK(std::abs(ab - ba) <= 1e-10 * ab);

  std::vector<double> a2 = a, b2 = b;
  for (std::size_t k = 0; k < g.size(); ++k) {
    a2[k] += 3.0;
    b2[k] += 3.0;
  }
  CHECK(std::abs(hminus1_sq(ScalarField(g, a2), ScalarField(g, b2)) - ab) <= 1e-9 * ab);

  std::vector<double> b3 = b;
  b3[0] += 1.0;
  CHECK_THROWS_AS(hminus1_sq(fa, ScalarField(g, b3)), MassMismatch);
  CHECK_THROWS_AS(hminus1_sq(fa, ScalarField(Grid2D::unit_square(8), 1.0)), GridMismatch);
}
