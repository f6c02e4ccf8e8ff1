#ifndef DDIFF_FREEBOUNDARY_HPP
#define DDIFF_FREEBOUNDARY_HPP

#include "ddiff/flux.hpp"
#include "ddiff/grid.hpp"
#include "ddiff/stepper.hpp"

#include <cstddef>
#include <functional>
#include <vector>

namespace ddiff {

/// Radial profile r -> rho0(r), assumed continuous and decreasing.
using RadialFunction = std::function<double(double)>;

/// u on the mapped interval xi = r / R in [0, 1]. The first n_cells values
/// sit at cell centers xi_k = (k + 1/2) / n_cells; the last value is the
/// front node xi = 1, held at rho_cr.
class RadialProfile
{
public:
  RadialProfile(std::vector<double> values);

  std::size_t n_nodes() const noexcept { return values_.size(); }
  std::size_t n_cells() const noexcept { return values_.size() - 1; }
  double dxi() const noexcept { return 1.0 / static_cast<double>(n_cells()); }
  double xi(std::size_t k) const noexcept
  {
    return k == n_cells() ? 1.0 : (static_cast<double>(k) + 0.5) * dxi();
  }

  const std::vector<double>& values() const noexcept { return values_; }
  std::vector<double>& values() noexcept { return values_; }
  double operator[](std::size_t k) const noexcept { return values_[k]; }

  /// Linear interpolation in xi; constant below the first center.
  double at(double xi) const;

private:
  std::vector<double> values_;
};

struct RadialFrontState
{
  double t = 0.0;
  double R = 0.0;
  RadialProfile profile;
  RadialFunction rho0;
  double rho_cr = 1.0;
  double r_max = 1.0;  ///< radius of the disk the oracle lives in
};

/// Radius where rho0 crosses rho_cr, by bisection on [0, r_max].
double front_radius_initial(const RadialFunction& rho0, double rho_cr, double r_max = 1.0);

/// R_inf with disk average of rho0 over {|x| < R_inf} equal to rho_cr.
/// Throws NoRoot unless rho0(0) > rho_cr and the average over the disk of
/// radius r_max is below rho_cr.
double r_infinity(const RadialFunction& rho0, double rho_cr, double r_max = 1.0);

/// Disk average (2 / R^2) int_0^R rho0(r) r dr.
double disk_average(const RadialFunction& rho0, double R);

/// Initial state: R = R0, u(xi) = rho0(xi R0), front node at rho_cr.
RadialFrontState initial_radial_state(const RadialFunction& rho0, double rho_cr, std::size_t n_cells,
                                      double r_max = 1.0);

/// |d/dr f(u)| at the front (3-point one-sided difference in xi, over R)
/// divided by rho_cr - rho0(R). Throws DegenerateFront when that gap is
/// below 1e-12.
double stefan_velocity(const RadialFrontState& state, const FluxFunction& flux);

struct RadialStep
{
  RadialFrontState state;
  int picard_iters = 0;
  bool converged = false;
};

/// One implicit step of the mapped interior problem coupled to the front.
///
/// The interior is advanced in the conservative form
///   d/dt (R^2 xi u) = d/dxi [ xi f(u)_xi + R R' xi^2 u ]
/// with frozen-coefficient Picard iterations, and the front moves so that
///   int_R^{R_new} (rho_cr - rho0(r)) r dr = -tau * xi f(u)_xi |_{xi=1},
/// the time-integrated jump condition. The composite density therefore
/// conserves mass to the Picard tolerance. Throws FrontRetreat if the
/// front would have to move inward.
RadialStep advance_radial(const RadialFrontState& state, double tau, const FluxFunction& flux,
                          const StepperConfig& cfg);

/// Adaptive driver: halves tau on stalls or large relative changes, grows
/// it after easy steps, and lands exactly on t_target. `tau` carries the
/// proposal across calls. Throws TimestepUnderflow.
void evolve_radial(RadialFrontState& state, double t_target, double& tau, const FluxFunction& flux,
                   const StepperConfig& cfg);

/// 2 pi [ R^2 sum V_k u_k + int_R^{r_max} rho0(r) r dr ].
double composite_mass(const RadialFrontState& state);

/// u(|x| / R) inside the front, rho0(|x|) outside, at cell centers.
ScalarField composite_to_2d(const RadialFrontState& state, const Grid2D& grid);

/// rho_cr inside the disk of radius R_inf, rho0 outside.
ScalarField steady_state_radial(const RadialFunction& rho0, double rho_cr, const Grid2D& grid,
                                double r_max = 1.0);

/// Radius of the disk with the same area as {rho > rho_cr}.
double contour_radius(const ScalarField& field, double rho_cr);

} // namespace ddiff

#endif
