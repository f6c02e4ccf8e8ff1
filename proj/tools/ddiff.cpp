// Command-line front end: run, analyze, compare-oracle, presets list.

#include "ddiff/commands.hpp"
#include "ddiff/config.hpp"
#include "ddiff/errors.hpp"
#include "ddiff/presets.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <iostream>
#include <optional>
#include <sstream>

namespace {

struct ExperimentArgs
{
  std::string preset;
  std::string config;
  std::optional<std::size_t> cells;
  std::optional<double> t_end;
  std::string out;
};

void add_experiment_flags(CLI::App* app, ExperimentArgs& a)
{
  auto* p = app->add_option("--preset", a.preset, "Named preset (see 'presets list')");
  auto* c = app->add_option("--config", a.config, "JSON experiment configuration");
  p->excludes(c);
  app->add_option("--cells", a.cells, "Override the grid with N x N cells")->check(CLI::PositiveNumber);
  app->add_option("--t-end", a.t_end, "Override the final time")->check(CLI::NonNegativeNumber);
  app->add_option("--out", a.out, "Output directory (defaults to the config's 'outputs')");
}

ddiff::ExperimentConfig resolve(const ExperimentArgs& a)
{
  if (a.preset.empty() && a.config.empty())
    throw ddiff::ConfigError("one of --preset or --config is required");
  ddiff::ExperimentConfig cfg = a.preset.empty() ? ddiff::load_config(a.config) : ddiff::preset_config(a.preset);
  if (a.cells)
    cfg = ddiff::with_cells(cfg, *a.cells);
  if (a.t_end)
    cfg.t_end = *a.t_end;
  if (!a.out.empty())
    cfg.outputs = a.out;
  return cfg;
}

void config_error(const ddiff::Error& e)
{
  std::cerr << nlohmann::json{{"error", e.code()}, {"message", e.what()}}.dump() << '\n';
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Implicit finite-difference solver for degenerate diffusion with a critical density"};
  app.require_subcommand(1);

  ExperimentArgs run_args;
  auto* run = app.add_subcommand("run", "Run an experiment and write series, snapshots and a summary");
  add_experiment_flags(run, run_args);

  std::string series;
  std::optional<double> t_min, t_max;
  std::vector<std::string> columns;
  std::string kind;
  std::string analyze_out = ".";
  auto* analyze = app.add_subcommand("analyze", "Fit decay rates to a series CSV");
  analyze->add_option("--series", series, "Series CSV")->required();
  analyze->add_option("--t-min", t_min, "Window start (default: middle of the time range)");
  analyze->add_option("--t-max", t_max, "Window end (default: last time)");
  analyze->add_option("--columns", columns, "Columns to fit")->delimiter(',');
  analyze->add_option("--kind", kind, "Force log-log or semi-log for every column")
    ->check(CLI::IsMember({"log-log", "semi-log"}));
  analyze->add_option("--out", analyze_out, "Directory for rates.json");

  ExperimentArgs oracle_args;
  auto* oracle = app.add_subcommand("compare-oracle", "Compare the 2D solver with the radial free-boundary oracle");
  add_experiment_flags(oracle, oracle_args);
  std::optional<std::size_t> radial_cells;
  oracle->add_option("--radial-cells", radial_cells, "Radial cells of the oracle")->check(CLI::PositiveNumber);

  auto* presets = app.add_subcommand("presets", "Inspect presets");
  presets->require_subcommand(1);
  auto* list = presets->add_subcommand("list", "List preset names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ddiff::kExitConfig;
  }

  if (*run) {
    ddiff::ExperimentConfig cfg;
    try {
      cfg = resolve(run_args);
    } catch (const ddiff::Error& e) {
      config_error(e);
      return ddiff::kExitConfig;
    }
    return ddiff::run_command(cfg, cfg.outputs, std::cerr);
  }

  if (*analyze) {
    ddiff::AnalyzeOptions opts;
    opts.columns = columns;
    if (t_min || t_max) {
      // A missing bound leaves that side of the window open.
      double lo = t_min.value_or(-std::numeric_limits<double>::infinity());
      double hi = t_max.value_or(std::numeric_limits<double>::infinity());
      opts.window = std::make_pair(lo, hi);
    }
    if (!kind.empty())
      opts.kind = kind == "log-log" ? ddiff::FitKind::LogLog : ddiff::FitKind::SemiLog;
    return ddiff::analyze_command(series, opts, analyze_out, std::cout, std::cerr);
  }

  if (*oracle) {
    ddiff::ExperimentConfig cfg;
    try {
      cfg = resolve(oracle_args);
      if (radial_cells)
        cfg.oracle.n_cells = *radial_cells;
    } catch (const ddiff::Error& e) {
      config_error(e);
      return ddiff::kExitConfig;
    }
    return ddiff::compare_oracle_command(cfg, cfg.outputs, std::cout, std::cerr);
  }

  if (*list) {
    for (const auto& p : ddiff::preset_list())
      std::cout << p.name << "\t" << p.description << '\n';
    return ddiff::kExitOk;
  }
  return ddiff::kExitOk;
}
