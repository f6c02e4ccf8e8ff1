#ifndef DDIFF_DIAGNOSTICS_HPP
#define DDIFF_DIAGNOSTICS_HPP

#include "ddiff/flux.hpp"
#include "ddiff/grid.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ddiff {

/// One row of the time series.
struct SeriesRecord
{
  double t = 0.0;
  double dt = 0.0;
  double mass = 0.0;        ///< int rho
  double energy = 0.0;      ///< int F(rho)
  double rel_energy = 0.0;  ///< int F(rho | rho_inf)
  double pos_l1 = 0.0;      ///< ||(rho - rho_cr)_+||_1
  double max_val = 0.0;
  double min_val = 0.0;
  std::size_t n_components = 0;
  std::optional<double> hm1_sq;  ///< filled by the post-pass, if at all

  bool operator==(const SeriesRecord&) const = default;
};

/// Measures one field. Quadratures are midpoint sums; the component count
/// uses `threshold` (callers default it to rho_inf / 2).
SeriesRecord record(const ScalarField& field, double t, double dt, const FluxFunction& flux,
                    double rho_inf, double threshold);

inline SeriesRecord record(const ScalarField& field, double t, double dt, const FluxFunction& flux,
                           double rho_inf)
{
  return record(field, t, dt, flux, rho_inf, 0.5 * rho_inf);
}

enum class FitKind { LogLog, SemiLog };

const char* to_string(FitKind kind);

struct DecayFit
{
  double t_lo = 0.0;
  double t_hi = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  FitKind kind = FitKind::LogLog;
  std::size_t n_samples = 0;
};

/// Least-squares line through (log t, log y) or (t, log y) restricted to
/// t in [lo, hi]; without a window the last half of the sampled time range
/// is used. Samples with y <= 0 (or NaN) are dropped. Throws
/// InsufficientData when the window holds fewer than 5 samples and
/// NonPositiveValues when dropping leaves fewer than 5.
DecayFit fit_decay(std::span<const double> t, std::span<const double> y,
                   std::optional<std::pair<double, double>> window, FitKind kind);

struct MonotonicityResult
{
  bool ok = true;
  double worst_violation = 0.0;
};

/// Worst decrease of min(rho, rho_cr) between two fields on the same grid.
MonotonicityResult monotonicity_audit(const ScalarField& prev, const ScalarField& next, double rho_cr,
                                      double tol);

/// Number of 4-connected components of {cells : value > threshold}.
std::size_t superlevel_components(const ScalarField& field, double threshold);

/// Per-step audit of the discrete conservation and ordering properties.
class InvariantAudit
{
public:
  struct Tolerances
  {
    double mass_rel = 1e-10;
    double energy_abs = 1e-10;
    double max_rel = 1e-8;
    double min_abs = 1e-8;
    double monotonicity = 1e-6;
  };

  struct Report
  {
    std::size_t steps = 0;
    double mass_drift = 0.0;           ///< worst |mass_n - mass_0| / mass_0
    double energy_increase = 0.0;      ///< worst per-step increase of int F
    double max_excess = 0.0;           ///< worst max rho_n / max rho_0 - 1
    double min_deficit = 0.0;          ///< worst min rho_0 - min rho_n
    double monotonicity = 0.0;         ///< worst monotonicity violation
    bool mass_ok = true;
    bool energy_ok = true;
    bool max_ok = true;
    bool min_ok = true;
    bool monotonicity_ok = true;

    bool all_ok() const { return mass_ok && energy_ok && max_ok && min_ok && monotonicity_ok; }
  };

  InvariantAudit(const ScalarField& ic, const FluxFunction& flux);
  InvariantAudit(const ScalarField& ic, const FluxFunction& flux, Tolerances tol);

  void observe(const ScalarField& prev, const ScalarField& next);
  const Report& report() const noexcept { return report_; }

private:
  FluxFunction flux_;
  Tolerances tol_;
  double mass0_;
  double max0_;
  double min0_;
  Report report_;
};

double total_energy(const ScalarField& field, const FluxFunction& flux);

/// Fills hm1_sq for every retained (series index, field) pair, measured
/// against `final_field`. The final record gets 0.
void hm1_post_pass(std::vector<SeriesRecord>& series,
                   const std::vector<std::pair<std::size_t, ScalarField>>& retained,
                   const ScalarField& final_field);

} // namespace ddiff

#endif
