#ifndef DDIFF_COMMANDS_HPP
#define DDIFF_COMMANDS_HPP

#include "ddiff/config.hpp"
#include "ddiff/diagnostics.hpp"
#include "ddiff/freeboundary.hpp"
#include "ddiff/stepper.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ddiff {

// Exit statuses of the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitUnsupportedIc = 3;

struct RunArtifacts
{
  RunResult result;
  InvariantAudit::Report audit;
  nlohmann::json summary;
};

/// Runs the experiment and writes series.csv, snap_<t>.ddif and
/// summary.json into `out_dir` (created if missing).
RunArtifacts execute_run(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

/// execute_run plus error mapping: 0 on success, 1 on runtime errors or
/// invariant violations (with a JSON error line on `err`).
int run_command(const ExperimentConfig& cfg, const std::filesystem::path& out_dir, std::ostream& err);

/// The default fit for each series column: semi-log for rel_energy,
/// log-log for energy, pos_l1 and hm1_sq.
FitKind default_fit_kind(const std::string& column);

struct AnalyzeOptions
{
  std::optional<std::pair<double, double>> window;
  std::vector<std::string> columns;  ///< empty: every known decay column present in the file
  std::optional<FitKind> kind;       ///< overrides the per-column default
};

/// Fits the requested columns; throws InsufficientData/NonPositiveValues.
nlohmann::json analyze_series(const std::filesystem::path& series, const AnalyzeOptions& opts);

/// analyze_series, printing a line per fit and writing rates.json to out_dir.
int analyze_command(const std::filesystem::path& series, const AnalyzeOptions& opts,
                    const std::filesystem::path& out_dir, std::ostream& out, std::ostream& err);

struct OracleRow
{
  double t = 0.0;
  double R_oracle = 0.0;
  double R_contour_2d = 0.0;
  double l1_diff = 0.0;  ///< ||composite - rho_2d||_1 / ||rho_2d||_1
};

struct OracleComparison
{
  std::vector<OracleRow> rows;
  double hx = 0.0;
  double R_inf = 0.0;
  double R_inf_residual = 0.0;     ///< |disk average(R_inf) - rho_cr|
  double final_t = 0.0;
  double final_R_contour = 0.0;
  double final_l1_vs_steady = 0.0; ///< relative L1 distance of the final 2D field to the steady state
  double oracle_mass_drift = 0.0;  ///< worst |M(t) - M(0)| / M(0) of the composite
};

/// Runs the 2D stepper and the radial oracle side by side. Throws
/// UnsupportedIC unless the initial datum is radial, decreasing,
/// supercritical at the center and subcritical on average.
OracleComparison compare_oracle(const ExperimentConfig& cfg);

/// compare_oracle plus oracle.csv and oracle_summary.json; exit 3 for
/// unsupported initial data.
int compare_oracle_command(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                           std::ostream& out, std::ostream& err);

/// Default comparison times: a 1-2-5 ladder up to t_end, plus t_end.
std::vector<double> default_oracle_times(double t_end);

} // namespace ddiff

#endif
