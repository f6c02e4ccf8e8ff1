#include "ddiff/elliptic.hpp"

#include "ddiff/errors.hpp"
#include "ddiff/stencil.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ddiff {

std::vector<double> neumann_laplacian(const Grid2D& grid, std::span<const double> v)
{
  return apply_diffusion(grid, unit_face_coefficients(grid), v);
}

PoissonSolution poisson_neumann(const Grid2D& grid, std::span<const double> rhs, const CgOptions& opts)
{
  if (rhs.size() != grid.size())
    throw InvalidArgument("poisson_neumann: rhs length does not match grid");
  const double n = static_cast<double>(rhs.size());
  double m = 0.0;
  for (double v : rhs)
    m += v;
  m /= n;
  std::vector<double> b(rhs.begin(), rhs.end());
  for (double& v : b)
    v -= m;

  const FaceCoefficients unit = unit_face_coefficients(grid);
  LinearOperator op(grid.size(), [&](std::span<const double> v, std::span<double> y) {
    apply_operator(grid, unit, 0.0, 1.0, v, y);
  });
  CgOptions o = opts;
  if (o.max_iter == 0)
    o.max_iter = 10 * (grid.nx() + grid.ny());
  CgResult r = cg_solve(op, b, o);
  if (!r.converged)
    throw NonConvergence("poisson_neumann: CG stopped after " + std::to_string(r.iters) +
                         " iterations with residual " + std::to_string(r.residual));

  // Iterates stay in the zero-mean subspace up to rounding.
  double vm = 0.0;
  for (double v : r.x)
    vm += v;
  vm /= n;
  for (double& v : r.x)
    v -= vm;

  const double energy = std::max(dot(r.x, b) * grid.cell_area(), 0.0);
  return {ScalarField::signed_field(grid, std::move(r.x)), energy, r.iters};
}

double hminus1_sq(const ScalarField& rho_a, const ScalarField& rho_b, const CgOptions& opts)
{
  if (!(rho_a.grid() == rho_b.grid()))
    throw GridMismatch("hminus1_sq: fields live on different grids");
  const double ma = mean(rho_a), mb = mean(rho_b);
  if (std::abs(ma - mb) > 1e-8 * std::max({1.0, std::abs(ma), std::abs(mb)}))
    throw MassMismatch("hminus1_sq: means differ (" + std::to_string(ma) + " vs " +
                       std::to_string(mb) + ")");
  std::vector<double> d(rho_a.grid().size());
  for (std::size_t k = 0; k < d.size(); ++k)
    d[k] = rho_a[k] - rho_b[k];
  return poisson_neumann(rho_a.grid(), d, opts).energy_sq;
}

} // namespace ddiff
