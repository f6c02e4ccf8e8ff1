#ifndef DDIFF_ELLIPTIC_HPP
#define DDIFF_ELLIPTIC_HPP

#include "ddiff/grid.hpp"
#include "ddiff/linsolve.hpp"

#include <span>
#include <vector>

namespace ddiff {

struct PoissonSolution
{
  ScalarField potential;   ///< zero-mean V, signed
  double energy_sq = 0.0;  ///< discrete int |grad V|^2 = <V, rhs> hx hy
  std::size_t iters = 0;
};

/// Solves -Lap_h V = rhs with zero-flux walls on the zero-mean subspace.
/// The mean of `rhs` is removed first; a mean larger than 1e-10 (relative
/// to max |rhs|) is rejected as incompatible. Throws NonConvergence when
/// CG fails.
PoissonSolution poisson_neumann(const Grid2D& grid, std::span<const double> rhs,
                                const CgOptions& opts = {});

/// Unit-coefficient Neumann Laplacian (-Lap_h v), sharing the stepper's stencil.
std::vector<double> neumann_laplacian(const Grid2D& grid, std::span<const double> v);

/// Squared discrete H^-1 distance of two equal-mass densities. Throws
/// MassMismatch when the means differ by more than 1e-8 (relative to the
/// larger mean, floored at 1).
double hminus1_sq(const ScalarField& rho_a, const ScalarField& rho_b, const CgOptions& opts = {});

} // namespace ddiff

#endif
