#ifndef DDIFF_FLUX_HPP
#define DDIFF_FLUX_HPP

namespace ddiff {

/// Power-law degenerate flux f(s) = scale * (s - rho_cr)_+^kappa.
///
/// f and its derivative vanish identically on [0, rho_cr]; kappa > 1 makes
/// f continuously differentiable across the critical density. All member
/// functions reject negative densities with InvalidArgument, since a
/// negative value can only come from a corrupted field.
class FluxFunction
{
public:
  FluxFunction(double rho_cr, double kappa, double scale = 1.0);

  double rho_cr() const noexcept { return rho_cr_; }
  double kappa() const noexcept { return kappa_; }
  double scale() const noexcept { return scale_; }

  double eval(double s) const;
  double deriv(double s) const;
  /// f''; unbounded near rho_cr when kappa < 2, zero below it.
  double deriv2(double s) const;

  /// Primitive F(s) = int_0^s f.
  double energy(double s) const;

  /// Bregman distance F(s) - F(r) - f(r)(s - r) of s to r; nonnegative.
  double rel_energy(double s, double rho_inf) const;

private:
  double rho_cr_;
  double kappa_;
  double scale_;
};

} // namespace ddiff

#endif
