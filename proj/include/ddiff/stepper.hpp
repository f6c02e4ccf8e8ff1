#ifndef DDIFF_STEPPER_HPP
#define DDIFF_STEPPER_HPP

#include "ddiff/diagnostics.hpp"
#include "ddiff/flux.hpp"
#include "ddiff/grid.hpp"
#include "ddiff/stencil.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace ddiff {

struct StepperConfig
{
  double tau_init = 1e-4;
  double tau_min = 1e-12;
  double tau_max = 1e-1;
  double picard_tol = 1e-9;
  int picard_max = 50;
  double accept_tol = 1e-2;
  int growth_iter_threshold = 10;  ///< grow dt only if Picard took fewer iterations
  double grow_factor = 1.1;
  double shrink_factor = 0.5;
  double lin_tol = 1e-10;
  std::size_t lin_max_iter = 0;    ///< 0 selects 10 * (nx + ny)
  int anderson_depth = 0;          ///< 0 is the plain fixed-point iteration
  /// Solve each step by Newton's method instead of the fixed-point
  /// iteration. Same discrete system, same stopping rule on the update.
  bool newton = false;

  /// Throws InvalidArgument on inconsistent bounds or factors.
  void validate() const;

  std::size_t lin_max_iter_for(const Grid2D& grid) const
  {
    return lin_max_iter ? lin_max_iter : 10 * (grid.nx() + grid.ny());
  }

  bool operator==(const StepperConfig&) const = default;
};

/// Arithmetic mean of f' at the two cells adjacent to each interior face.
FaceCoefficients face_coefficients(const ScalarField& field, const FluxFunction& flux);

struct PicardResult
{
  std::optional<ScalarField> field;  ///< empty when stalled
  int iters = 0;
  std::size_t cg_iters = 0;
  bool converged = false;
};

/// One implicit Euler step solved by frozen-coefficient fixed-point
/// iteration, or by Newton's method when cfg.newton is set. A stall (Picard cap reached or a linear solve failing) is
/// reported through `converged == false`, not by throwing.
PicardResult picard_step(const ScalarField& rho_prev, double tau, const StepperConfig& cfg,
                         const FluxFunction& flux);

/// First Picard iterate only: solves (I + tau A(rho_prev)) x = rho_prev.
ScalarField picard_first_iterate(const ScalarField& rho_prev, double tau, const StepperConfig& cfg,
                                 const FluxFunction& flux);

/// ||rho_next + tau A(rho_next) rho_next - rho_prev||_2 (unweighted), the
/// residual of the fully implicit nonlinear scheme.
double scheme_residual(const ScalarField& rho_next, const ScalarField& rho_prev, double tau,
                       const FluxFunction& flux);

struct StepState
{
  double t = 0.0;
  double tau = 0.0;  ///< increment proposed for the next step
  ScalarField rho;
};

struct StepRecord
{
  double t = 0.0;
  double tau_used = 0.0;
  int picard_iters = 0;
  std::size_t cg_iters_total = 0;
  int rejected_attempts = 0;
  double rel_change = 0.0;
};

/// Adaptive step: halves tau on a stall or on a relative change above
/// accept_tol, grows it by grow_factor after an easy step. `tau_cap`
/// limits the attempted increment without altering the proposal carried
/// to the next step. Throws TimestepUnderflow below tau_min.
std::pair<StepState, StepRecord> advance(const StepState& state, const StepperConfig& cfg,
                                         const FluxFunction& flux,
                                         std::optional<double> tau_cap = std::nullopt);

struct Snapshot
{
  double t_requested = 0.0;
  double t = 0.0;
  ScalarField field;
};

struct RunOptions
{
  double t_end = 0.0;
  std::vector<double> snapshot_times;
  /// Threshold for the component count; defaults to rho_inf / 2.
  std::optional<double> segregation_threshold;
  /// Clip increments so that snapshot times and t_end are hit exactly.
  bool land_on_times = true;
  /// Number of log-spaced times at which the field is retained for the
  /// H^-1 post-pass; 0 disables it.
  std::size_t hm1_samples = 64;
  /// Called after each accepted step with the previous and new field.
  std::function<void(const ScalarField& prev, const ScalarField& next, const StepRecord&)> observer;
};

struct RunResult
{
  ScalarField final_field;
  std::vector<SeriesRecord> series;
  std::vector<StepRecord> steps;
  std::vector<Snapshot> snapshots;
  /// (series index, field) pairs kept for the H^-1 post-pass.
  std::vector<std::pair<std::size_t, ScalarField>> retained;
};

/// Marches from `ic` to t_end. The final series record also receives the
/// hm1_sq post-pass against the final field when hm1_samples > 0.
RunResult run(const ScalarField& ic, const StepperConfig& cfg, const FluxFunction& flux,
              const RunOptions& opts);

} // namespace ddiff

#endif
