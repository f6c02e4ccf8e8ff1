#include "ddiff/freeboundary.hpp"

#include "ddiff/errors.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace ddiff {

namespace {

// int_a^b g(r) r dr
double moment(const RadialFunction& g, double a, double b)
{
  if (b <= a)
    return 0.0;
  auto integrand = [&](double r) { return g(r) * r; };
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, a, b, 15, 1e-14);
}

// int_a^b (rho_cr - rho0(r)) r dr on fixed Gauss panels of width <= 1/20.
// The root finder calls this for intervals that start at the front, where
// the integrand vanishes; an adaptive rule with a relative tolerance keeps
// subdividing there for no gain.
double gap_moment(const RadialFunction& rho0, double rho_cr, double a, double b)
{
  if (b <= a)
    return 0.0;
  auto integrand = [&](double r) { return (rho_cr - rho0(r)) * r; };
  const int panels = static_cast<int>(std::ceil((b - a) * 20.0));
  const double w = (b - a) / panels;
  double sum = 0.0;
  for (int k = 0; k < panels; ++k)
    sum += boost::math::quadrature::gauss<double, 20>::integrate(integrand, a + k * w, a + (k + 1) * w);
  return sum;
}

// Tridiagonal solve; lower[0] and upper[n-1] are ignored.
std::vector<double> thomas(std::vector<double> lower, std::vector<double> diag, std::vector<double> upper,
                           std::vector<double> rhs)
{
  const std::size_t n = diag.size();
  for (std::size_t k = 1; k < n; ++k) {
    const double m = lower[k] / diag[k - 1];
    diag[k] -= m * upper[k - 1];
    rhs[k] -= m * rhs[k - 1];
  }
  std::vector<double> x(n);
  x[n - 1] = rhs[n - 1] / diag[n - 1];
  for (std::size_t k = n - 1; k-- > 0;)
    x[k] = (rhs[k] - upper[k] * x[k + 1]) / diag[k];
  return x;
}

} // namespace

RadialProfile::RadialProfile(std::vector<double> values) : values_(std::move(values))
{
  if (values_.size() < 3)
    throw InvalidArgument("RadialProfile: need at least 3 nodes");
}

double RadialProfile::at(double x) const
{
  const std::size_t n = n_cells();
  if (x <= xi(0))
    return values_[0];
  if (x >= 1.0)
    return values_[n];
  // Centers are uniform up to the last cell; the final gap is half a cell.
  const double s = x / dxi() - 0.5;
  std::size_t k = static_cast<std::size_t>(s);
  if (k >= n - 1) {
    const double w = (x - xi(n - 1)) / (1.0 - xi(n - 1));
    return (1.0 - w) * values_[n - 1] + w * values_[n];
  }
  const double w = s - static_cast<double>(k);
  return (1.0 - w) * values_[k] + w * values_[k + 1];
}

double disk_average(const RadialFunction& rho0, double R)
{
  if (R <= 0.0)
    return rho0(0.0);
  return 2.0 / (R * R) * moment(rho0, 0.0, R);
}

double front_radius_initial(const RadialFunction& rho0, double rho_cr, double r_max)
{
  if (!(rho0(0.0) > rho_cr) || !(rho0(r_max) < rho_cr))
    throw NoRoot("front_radius_initial: rho0 does not cross rho_cr inside the disk");
  double lo = 0.0, hi = r_max;
  for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
    const double mid = 0.5 * (lo + hi);
    (rho0(mid) > rho_cr ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double r_infinity(const RadialFunction& rho0, double rho_cr, double r_max)
{
  if (!(rho0(0.0) > rho_cr))
    throw NoRoot("r_infinity: rho0(0) must exceed rho_cr");
  if (!(disk_average(rho0, r_max) < rho_cr))
    throw NoRoot("r_infinity: the average over the disk is not below rho_cr");
  // The disk average decreases in R because rho0 does.
  double lo = 0.0, hi = r_max;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (disk_average(rho0, mid) > rho_cr ? lo : hi) = mid;
  }
  const double R = 0.5 * (lo + hi);
  if (!(std::abs(disk_average(rho0, R) - rho_cr) <= 1e-10))
    throw NoRoot("r_infinity: bisection residual above 1e-10");
  return R;
}

RadialFrontState initial_radial_state(const RadialFunction& rho0, double rho_cr, std::size_t n_cells,
                                      double r_max)
{
  if (n_cells < 2)
    throw InvalidArgument("initial_radial_state: need at least 2 cells");
  const double R0 = front_radius_initial(rho0, rho_cr, r_max);
  std::vector<double> u(n_cells + 1);
  for (std::size_t k = 0; k < n_cells; ++k)
    u[k] = std::max(rho0((static_cast<double>(k) + 0.5) / static_cast<double>(n_cells) * R0), rho_cr);
  u[n_cells] = rho_cr;
  return RadialFrontState{0.0, R0, RadialProfile(std::move(u)), rho0, rho_cr, r_max};
}

double stefan_velocity(const RadialFrontState& s, const FluxFunction& flux)
{
  const double gap = s.rho_cr - s.rho0(s.R);
  if (!(gap >= 1e-12))
    throw DegenerateFront("stefan_velocity: density jump at the front is " + std::to_string(gap));
  const RadialProfile& p = s.profile;
  const std::size_t n = p.n_cells();
  // Lagrange derivative at x0 = 1 through the front node and the last two centers.
  const double x0 = 1.0, x1 = p.xi(n - 1), x2 = p.xi(n - 2);
  const double w0 = 1.0 / (x0 - x1) + 1.0 / (x0 - x2);
  const double w1 = (x0 - x2) / ((x1 - x0) * (x1 - x2));
  const double w2 = (x0 - x1) / ((x2 - x0) * (x2 - x1));
  const double dfdxi = w0 * flux.eval(p[n]) + w1 * flux.eval(p[n - 1]) + w2 * flux.eval(p[n - 2]);
  return std::abs(dfdxi / s.R) / gap;
}

RadialStep advance_radial(const RadialFrontState& state, double tau, const FluxFunction& flux,
                          const StepperConfig& cfg)
{
  if (!(tau > 0.0))
    throw InvalidArgument("advance_radial: tau must be positive");
  const RadialProfile& p = state.profile;
  const std::size_t n = p.n_cells();
  const double h = p.dxi();
  const double rho_cr = state.rho_cr;
  const double R = state.R;

  std::vector<double> vol(n), face(n + 1);
  for (std::size_t k = 0; k < n; ++k)
    vol[k] = p.xi(k) * h;  // exact int xi dxi over the cell
  for (std::size_t k = 0; k <= n; ++k)
    face[k] = static_cast<double>(k) * h;

  RadialStep out{state, 0, false};
  std::vector<double> prev(p.values().begin(), p.values().end() - 1);
  double R_new = R;
  std::vector<double> a(n + 1), lower(n), diag(n), upper(n), rhs(n);
  for (int it = 1; it <= cfg.picard_max; ++it) {
    out.picard_iters = it;
    // a[k] sits on the face between cells k-1 and k; a[n] is the front face.
    a[0] = 0.0;
    for (std::size_t k = 1; k < n; ++k)
      a[k] = 0.5 * (flux.deriv(prev[k - 1]) + flux.deriv(prev[k]));
    a[n] = 0.5 * (flux.deriv(prev[n - 1]) + flux.deriv(rho_cr));

    const double S = (R_new * R_new - R * R) / (2.0 * tau);
    for (std::size_t k = 0; k < n; ++k) {
      const double dl = k > 0 ? face[k] * a[k] / h : 0.0;
      const double dr = k + 1 < n ? face[k + 1] * a[k + 1] / h : a[n] / (0.5 * h);
      diag[k] = vol[k] * R_new * R_new + tau * (dl + dr) + tau * S * face[k] * face[k];
      lower[k] = -tau * dl;
      upper[k] = k + 1 < n ? -tau * (dr + S * face[k + 1] * face[k + 1]) : 0.0;
      rhs[k] = vol[k] * R * R * p[k];
    }
    rhs[n - 1] += tau * (a[n] / (0.5 * h) + S) * rho_cr;
    std::vector<double> u = thomas(lower, diag, upper, rhs);

    // Time-integrated jump condition; front_flux = xi f(u)_xi at xi = 1 (<= 0).
    const double front_flux = a[n] * (rho_cr - u[n - 1]) / (0.5 * h);
    const double target = -tau * front_flux;
    double R_next = R;
    if (target < -1e-14)
      throw FrontRetreat("advance_radial: front flux points inward at t = " + std::to_string(state.t));
    if (target > 0.0) {
      auto g = [&](double x) { return gap_moment(state.rho0, rho_cr, R, x) - target; };
      double d = std::max(1e-8, 1e-3 * R);
      while (g(R + d) < 0.0) {
        if (R + d >= state.r_max)
          throw NoRoot("advance_radial: front left the disk of radius " + std::to_string(state.r_max));
        d = std::min(2.0 * d, state.r_max - R);
      }
      boost::uintmax_t max_it = 200;
      auto [lo, hi] = boost::math::tools::toms748_solve(g, R, R + d, g(R), g(R + d),
                                                        boost::math::tools::eps_tolerance<double>(52),
                                                        max_it);
      R_next = 0.5 * (lo + hi);
    }

    double du = 0.0, ref = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      du += (u[k] - prev[k]) * (u[k] - prev[k]);
      ref += prev[k] * prev[k];
    }
    const bool settled = std::sqrt(du) <= cfg.picard_tol * std::sqrt(ref) &&
                         std::abs(R_next - R_new) <= cfg.picard_tol * R;
    prev = std::move(u);
    R_new = R_next;
    if (settled) {
      std::vector<double> vals(prev);
      vals.push_back(rho_cr);
      out.state.profile = RadialProfile(std::move(vals));
      out.state.R = std::max(R_new, R);
      out.state.t = state.t + tau;
      out.converged = true;
      return out;
    }
  }
  return out;
}

void evolve_radial(RadialFrontState& state, double t_target, double& tau, const FluxFunction& flux,
                   const StepperConfig& cfg)
{
  while (state.t < t_target) {
    const double remaining = t_target - state.t;
    const bool landing = remaining <= tau;
    const double tau_try = landing ? remaining : tau;
    RadialStep step = advance_radial(state, tau_try, flux, cfg);
    double change = std::numeric_limits<double>::infinity();
    if (step.converged) {
      double du = 0.0, ref = 0.0;
      const auto& a = state.profile.values();
      const auto& b = step.state.profile.values();
      for (std::size_t k = 0; k < a.size(); ++k) {
        du += (b[k] - a[k]) * (b[k] - a[k]);
        ref += a[k] * a[k];
      }
      change = std::sqrt(du / ref) + (step.state.R - state.R) / state.R;
    }
    if (!step.converged || change > cfg.accept_tol) {
      tau = tau_try * cfg.shrink_factor;
      if (tau < cfg.tau_min)
        throw TimestepUnderflow("evolve_radial: tau fell below tau_min at t = " + std::to_string(state.t));
      continue;
    }
    state = std::move(step.state);
    if (landing)
      state.t = t_target;
    if (step.picard_iters < cfg.growth_iter_threshold)
      tau = std::min(tau * cfg.grow_factor, cfg.tau_max);
  }
}

double composite_mass(const RadialFrontState& s)
{
  const RadialProfile& p = s.profile;
  double inner = 0.0;
  for (std::size_t k = 0; k < p.n_cells(); ++k)
    inner += p.xi(k) * p.dxi() * p[k];
  return 2.0 * std::numbers::pi * (s.R * s.R * inner + moment(s.rho0, s.R, s.r_max));
}

ScalarField composite_to_2d(const RadialFrontState& s, const Grid2D& grid)
{
  std::vector<double> v(grid.size());
  for (std::size_t j = 0; j < grid.ny(); ++j)
    for (std::size_t i = 0; i < grid.nx(); ++i) {
      const double r = std::hypot(grid.xc(i), grid.yc(j));
      v[grid.index(i, j)] = r < s.R ? s.profile.at(r / s.R) : s.rho0(r);
    }
  return ScalarField(grid, std::move(v));
}

ScalarField steady_state_radial(const RadialFunction& rho0, double rho_cr, const Grid2D& grid, double r_max)
{
  const double R_inf = r_infinity(rho0, rho_cr, r_max);
  std::vector<double> v(grid.size());
  for (std::size_t j = 0; j < grid.ny(); ++j)
    for (std::size_t i = 0; i < grid.nx(); ++i) {
      const double r = std::hypot(grid.xc(i), grid.yc(j));
      v[grid.index(i, j)] = r < R_inf ? rho_cr : rho0(r);
    }
  return ScalarField(grid, std::move(v));
}

double contour_radius(const ScalarField& field, double rho_cr)
{
  std::size_t count = 0;
  for (double v : field.values())
    if (v > rho_cr)
      ++count;
  return std::sqrt(static_cast<double>(count) * field.grid().cell_area() / std::numbers::pi);
}

} // namespace ddiff
