#include "ddiff/diagnostics.hpp"

#include "ddiff/elliptic.hpp"
#include "ddiff/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ddiff {

double total_energy(const ScalarField& field, const FluxFunction& flux)
{
  double s = 0.0;
  for (double v : field.values())
    s += flux.energy(v);
  return s * field.grid().cell_area();
}

SeriesRecord record(const ScalarField& field, double t, double dt, const FluxFunction& flux,
                    double rho_inf, double threshold)
{
  SeriesRecord r;
  r.t = t;
  r.dt = dt;
  double mass = 0.0, energy = 0.0, rel = 0.0, pos = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double v : field.values()) {
    mass += v;
    energy += flux.energy(v);
    rel += flux.rel_energy(v, rho_inf);
    pos += std::max(v - flux.rho_cr(), 0.0);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double w = field.grid().cell_area();
  r.mass = mass * w;
  r.energy = energy * w;
  r.rel_energy = rel * w;
  r.pos_l1 = pos * w;
  r.min_val = lo;
  r.max_val = hi;
  r.n_components = superlevel_components(field, threshold);
  return r;
}

const char* to_string(FitKind kind)
{
  return kind == FitKind::LogLog ? "log-log" : "semi-log";
}

DecayFit fit_decay(std::span<const double> t, std::span<const double> y,
                   std::optional<std::pair<double, double>> window, FitKind kind)
{
  if (t.size() != y.size())
    throw InvalidArgument("fit_decay: t and y differ in length");
  double lo, hi;
  if (window) {
    std::tie(lo, hi) = *window;
  } else {
    if (t.empty())
      throw InsufficientData("fit_decay: empty series");
    const auto [mn, mx] = std::minmax_element(t.begin(), t.end());
    lo = *mn + 0.5 * (*mx - *mn);
    hi = *mx;
  }
  if (!(lo < hi))
    throw InvalidArgument("fit_decay: empty window");

  std::size_t in_window = 0;
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (!(t[k] >= lo && t[k] <= hi))
      continue;
    if (kind == FitKind::LogLog && !(t[k] > 0.0))
      continue;
    ++in_window;
    if (!(y[k] > 0.0) || !std::isfinite(y[k]))
      continue;
    xs.push_back(kind == FitKind::LogLog ? std::log(t[k]) : t[k]);
    ys.push_back(std::log(y[k]));
  }
  if (in_window < 5)
    throw InsufficientData("fit_decay: " + std::to_string(in_window) + " samples in window, need 5");
  if (xs.size() < 5)
    throw NonPositiveValues("fit_decay: only " + std::to_string(xs.size()) +
                            " positive samples in window, need 5");

  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double dx = xs[k] - mx, dy = ys[k] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0))
    throw InsufficientData("fit_decay: all samples share one abscissa");

  DecayFit fit;
  fit.t_lo = lo;
  fit.t_hi = hi;
  fit.kind = kind;
  fit.n_samples = xs.size();
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double e = ys[k] - (fit.intercept + fit.slope * xs[k]);
    ss_res += e * e;
  }
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return fit;
}

MonotonicityResult monotonicity_audit(const ScalarField& prev, const ScalarField& next, double rho_cr,
                                      double tol)
{
  if (!(prev.grid() == next.grid()))
    throw GridMismatch("monotonicity_audit: fields live on different grids");
  MonotonicityResult r;
  for (std::size_t k = 0; k < prev.grid().size(); ++k) {
    const double drop = std::min(prev[k], rho_cr) - std::min(next[k], rho_cr);
    r.worst_violation = std::max(r.worst_violation, drop);
  }
  r.ok = r.worst_violation <= tol;
  return r;
}

std::size_t superlevel_components(const ScalarField& field, double threshold)
{
  const Grid2D& g = field.grid();
  const std::size_t nx = g.nx(), ny = g.ny();
  std::vector<char> seen(g.size(), 0);
  std::vector<std::size_t> stack;
  std::size_t count = 0;
  for (std::size_t start = 0; start < g.size(); ++start) {
    if (seen[start] || !(field[start] > threshold))
      continue;
    ++count;
    seen[start] = 1;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t k = stack.back();
      stack.pop_back();
      const std::size_t i = k % nx, j = k / nx;
      auto visit = [&](std::size_t q) {
        if (!seen[q] && field[q] > threshold) {
          seen[q] = 1;
          stack.push_back(q);
        }
      };
      if (i > 0)
        visit(k - 1);
      if (i + 1 < nx)
        visit(k + 1);
      if (j > 0)
        visit(k - nx);
      if (j + 1 < ny)
        visit(k + nx);
    }
  }
  return count;
}

InvariantAudit::InvariantAudit(const ScalarField& ic, const FluxFunction& flux)
  : InvariantAudit(ic, flux, Tolerances{})
{
}

InvariantAudit::InvariantAudit(const ScalarField& ic, const FluxFunction& flux, Tolerances tol)
  : flux_(flux), tol_(tol), mass0_(0.0), max0_(max_value(ic)), min0_(min_value(ic))
{
  for (double v : ic.values())
    mass0_ += v;
}

void InvariantAudit::observe(const ScalarField& prev, const ScalarField& next)
{
  Report& r = report_;
  ++r.steps;

  double mass = 0.0;
  for (double v : next.values())
    mass += v;
  const double drift = mass0_ > 0.0 ? std::abs(mass - mass0_) / mass0_ : std::abs(mass);
  r.mass_drift = std::max(r.mass_drift, drift);
  r.mass_ok = r.mass_drift <= tol_.mass_rel;

  const double de = total_energy(next, flux_) - total_energy(prev, flux_);
  r.energy_increase = std::max(r.energy_increase, de);
  r.energy_ok = r.energy_increase <= tol_.energy_abs;

  const double excess = max_value(next) / max0_ - 1.0;
  r.max_excess = std::max(r.max_excess, excess);
  r.max_ok = r.max_excess <= tol_.max_rel;

  r.min_deficit = std::max(r.min_deficit, min0_ - min_value(next));
  r.min_ok = r.min_deficit <= tol_.min_abs;

  const MonotonicityResult m = monotonicity_audit(prev, next, flux_.rho_cr(), tol_.monotonicity);
  r.monotonicity = std::max(r.monotonicity, m.worst_violation);
  r.monotonicity_ok = r.monotonicity <= tol_.monotonicity;
}

void hm1_post_pass(std::vector<SeriesRecord>& series,
                   const std::vector<std::pair<std::size_t, ScalarField>>& retained,
                   const ScalarField& final_field)
{
  for (const auto& [idx, field] : retained) {
    if (idx >= series.size())
      throw InvalidArgument("hm1_post_pass: retained index out of range");
    series[idx].hm1_sq = hminus1_sq(field, final_field);
  }
  if (!series.empty())
    series.back().hm1_sq = 0.0;
}

} // namespace ddiff
