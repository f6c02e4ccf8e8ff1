#include "ddiff/flux.hpp"

#include "ddiff/errors.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace ddiff {

namespace {

void check_density(double s, const char* what)
{
  if (!(s >= 0.0) || !std::isfinite(s))
    throw InvalidArgument(std::string(what) + ": density must be finite and nonnegative, got " +
                          std::to_string(s));
}

// (s - rho_cr)_+^p, exact zero below critical.
double excess_pow(double s, double rho_cr, double p)
{
  const double e = s - rho_cr;
  if (e <= 0.0)
    return 0.0;
  if (p == 1.0)
    return e;
  if (p == 2.0)
    return e * e;
  if (p == 3.0)
    return e * e * e;
  return std::pow(e, p);
}

} // namespace

FluxFunction::FluxFunction(double rho_cr, double kappa, double scale)
  : rho_cr_(rho_cr), kappa_(kappa), scale_(scale)
{
  if (!(rho_cr > 0.0) || !std::isfinite(rho_cr))
    throw InvalidArgument("flux: rho_cr must be positive");
  if (!(kappa > 1.0) || !std::isfinite(kappa))
    throw InvalidArgument("flux: kappa must be strictly greater than 1");
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw InvalidArgument("flux: scale must be positive");
}

double FluxFunction::eval(double s) const
{
  check_density(s, "flux eval");
  return scale_ * excess_pow(s, rho_cr_, kappa_);
}

double FluxFunction::deriv(double s) const
{
  check_density(s, "flux deriv");
  return scale_ * kappa_ * excess_pow(s, rho_cr_, kappa_ - 1.0);
}

double FluxFunction::deriv2(double s) const
{
  check_density(s, "flux deriv2");
  if (!(s > rho_cr_))
    return 0.0;
  return scale_ * kappa_ * (kappa_ - 1.0) * excess_pow(s, rho_cr_, kappa_ - 2.0);
}

double FluxFunction::energy(double s) const
{
  check_density(s, "flux energy");
  return scale_ / (kappa_ + 1.0) * excess_pow(s, rho_cr_, kappa_ + 1.0);
}

double FluxFunction::rel_energy(double s, double rho_inf) const
{
  check_density(s, "flux rel_energy");
  check_density(rho_inf, "flux rel_energy");
  const double es = s - rho_cr_;
  const double er = rho_inf - rho_cr_;
  if (es > 0.0 && er > 0.0) {
    // The textbook expression cancels catastrophically for s near rho_inf.
    if (kappa_ == 2.0) {
      const double d = es - er;
      return scale_ * d * d * (es + 2.0 * er) / 3.0;
    }
    if (std::abs(es - er) <= 0.5 * std::min(es, er)) {
      const double f_r = eval(rho_inf);
      auto integrand = [&](double t) { return eval(t) - f_r; };
      const double lo = std::min(s, rho_inf);
      const double hi = std::max(s, rho_inf);
      const double sign = s >= rho_inf ? 1.0 : -1.0;
      return std::max(sign * boost::math::quadrature::gauss<double, 20>::integrate(integrand, lo, hi), 0.0);
    }
  }
  const double v = energy(s) - energy(rho_inf) - eval(rho_inf) * (s - rho_inf);
  // Convexity makes the exact value nonnegative; clip rounding noise.
  return std::max(v, 0.0);
}

} // namespace ddiff
