#include "ddiff/commands.hpp"

#include "ddiff/errors.hpp"
#include "ddiff/io.hpp"
#include "ddiff/presets.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>

namespace ddiff {

using nlohmann::json;

namespace {

json error_json(const std::string& code, const std::string& message)
{
  return json{{"error", code}, {"message", message}};
}

void write_json(const std::filesystem::path& path, const json& j)
{
  std::ofstream out(path);
  if (!out)
    throw FormatError("cannot open '" + path.string() + "' for writing");
  out << j.dump(2) << '\n';
}

std::string snapshot_name(double t)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "snap_%g.ddif", t);
  return buf;
}

json fit_to_json(const DecayFit& f)
{
  json j{{"kind", to_string(f.kind)},
         {"t_lo", f.t_lo},
         {"t_hi", f.t_hi},
         {"slope", f.slope},
         {"intercept", f.intercept},
         {"r_squared", f.r_squared},
         {"n_samples", f.n_samples}};
  if (f.kind == FitKind::SemiLog)
    j["lambda"] = -f.slope;
  return j;
}

json fit_or_error(std::span<const double> t, std::span<const double> y, FitKind kind)
{
  try {
    return fit_to_json(fit_decay(t, y, std::nullopt, kind));
  } catch (const Error& e) {
    return error_json(e.code(), e.what());
  }
}

json audit_to_json(const InvariantAudit::Report& r)
{
  return json{{"steps", r.steps},
              {"mass_drift", r.mass_drift},
              {"energy_increase", r.energy_increase},
              {"max_excess", r.max_excess},
              {"min_deficit", r.min_deficit},
              {"monotonicity_violation", r.monotonicity},
              {"mass_ok", r.mass_ok},
              {"energy_ok", r.energy_ok},
              {"max_ok", r.max_ok},
              {"min_ok", r.min_ok},
              {"monotonicity_ok", r.monotonicity_ok},
              {"ok", r.all_ok()}};
}

} // namespace

RunArtifacts execute_run(const ExperimentConfig& cfg, const std::filesystem::path& out_dir)
{
  const FluxFunction flux = cfg.flux.make();
  const Grid2D grid = cfg.grid.make();
  const InitialCondition ic = build_ic(cfg.ic, grid);

  InvariantAudit audit(ic.field, flux);
  RunOptions opts;
  opts.t_end = cfg.t_end;
  opts.snapshot_times = cfg.snapshot_times;
  opts.segregation_threshold = cfg.segregation_threshold;
  opts.observer = [&](const ScalarField& prev, const ScalarField& next, const StepRecord&) {
    audit.observe(prev, next);
  };

  RunArtifacts art{run(ic.field, cfg.stepper, flux, opts), {}, {}};
  art.audit = audit.report();

  std::filesystem::create_directories(out_dir);
  write_series_csv(out_dir / "series.csv", art.result.series);
  for (const Snapshot& s : art.result.snapshots)
    write_snapshot(out_dir / snapshot_name(s.t_requested), s.field, s.t);

  const auto& series = art.result.series;
  std::vector<double> t, energy, rel, pos, hm1;
  for (const SeriesRecord& r : series) {
    t.push_back(r.t);
    energy.push_back(r.energy);
    rel.push_back(r.rel_energy);
    pos.push_back(r.pos_l1);
    hm1.push_back(r.hm1_sq.value_or(std::numeric_limits<double>::quiet_NaN()));
  }

  const ScalarField& fin = art.result.final_field;
  const double rho_inf = cfg.ic.rho_inf;
  double linf = 0.0, l2 = 0.0;
  for (double v : fin.values()) {
    linf = std::max(linf, std::abs(v - rho_inf));
    l2 += (v - rho_inf) * (v - rho_inf);
  }
  l2 = std::sqrt(l2 * grid.cell_area());
  const double threshold = cfg.segregation_threshold.value_or(0.5 * rho_inf);
  const SeriesRecord last = record(fin, series.empty() ? 0.0 : series.back().t,
                                   series.empty() ? 0.0 : series.back().dt, flux, rho_inf, threshold);

  int rejected = 0;
  for (const StepRecord& s : art.result.steps)
    rejected += s.rejected_attempts;

  art.summary = json{
    {"status", art.audit.all_ok() ? "ok" : "invariant_violation"},
    {"preset", cfg.ic.preset},
    {"t_end", cfg.t_end},
    {"config", config_to_json(cfg)},
    {"steps", art.result.steps.size()},
    {"rejected_attempts", rejected},
    {"segregation_threshold", threshold},
    {"final",
     {{"t", last.t},
      {"mass", last.mass},
      {"mean", mean(fin)},
      {"max", last.max_val},
      {"min", last.min_val},
      {"linf_dist_rho_inf", linf},
      {"l2_dist_rho_inf", l2},
      {"energy", last.energy},
      {"rel_energy", last.rel_energy},
      {"pos_l1", last.pos_l1},
      {"n_components", last.n_components}}},
    {"rates",
     {{"rel_energy", fit_or_error(t, rel, FitKind::SemiLog)},
      {"energy", fit_or_error(t, energy, FitKind::LogLog)},
      {"pos_l1", fit_or_error(t, pos, FitKind::LogLog)},
      {"hm1_sq", fit_or_error(t, hm1, FitKind::LogLog)}}},
    {"audit", audit_to_json(art.audit)}};
  write_json(out_dir / "summary.json", art.summary);
  return art;
}

int run_command(const ExperimentConfig& cfg, const std::filesystem::path& out_dir, std::ostream& err)
{
  try {
    const RunArtifacts art = execute_run(cfg, out_dir);
    if (!art.audit.all_ok()) {
      json e = error_json("InvariantViolation", "discrete invariant audit failed");
      e["audit"] = audit_to_json(art.audit);
      err << e.dump() << '\n';
      return kExitRuntime;
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << error_json(e.code(), e.what()).dump() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    err << error_json(e.code(), e.what()).dump() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << error_json("RuntimeError", e.what()).dump() << '\n';
    return kExitRuntime;
  }
}

FitKind default_fit_kind(const std::string& column)
{
  return column == "rel_energy" ? FitKind::SemiLog : FitKind::LogLog;
}

json analyze_series(const std::filesystem::path& series, const AnalyzeOptions& opts)
{
  const auto cols = read_csv_columns(series);
  const auto tcol = cols.find("t");
  if (tcol == cols.end())
    throw FormatError("analyze: series has no 't' column");

  std::vector<std::string> names = opts.columns;
  if (names.empty())
    for (const char* c : {"rel_energy", "energy", "pos_l1", "hm1_sq"})
      if (cols.count(c))
        names.emplace_back(c);
  if (names.empty())
    throw FormatError("analyze: no decay columns to fit");

  json fits = json::object();
  for (const std::string& name : names) {
    const auto it = cols.find(name);
    if (it == cols.end())
      throw FormatError("analyze: series has no '" + name + "' column");
    const FitKind kind = opts.kind.value_or(default_fit_kind(name));
    fits[name] = fit_to_json(fit_decay(tcol->second, it->second, opts.window, kind));
  }
  return json{{"series", series.string()}, {"fits", fits}};
}

int analyze_command(const std::filesystem::path& series, const AnalyzeOptions& opts,
                    const std::filesystem::path& out_dir, std::ostream& out, std::ostream& err)
{
  try {
    const json rates = analyze_series(series, opts);
    for (const auto& [name, f] : rates["fits"].items()) {
      out << name << ": " << f["kind"].get<std::string>() << " slope " << format_double(f["slope"].get<double>());
      if (f.contains("lambda"))
        out << " (lambda " << format_double(f["lambda"].get<double>()) << ")";
      out << ", r^2 " << format_double(f["r_squared"].get<double>()) << ", window ["
          << format_double(f["t_lo"].get<double>()) << ", " << format_double(f["t_hi"].get<double>())
          << "]\n";
    }
    std::filesystem::create_directories(out_dir);
    write_json(out_dir / "rates.json", rates);
    return kExitOk;
  } catch (const Error& e) {
    err << error_json(e.code(), e.what()).dump() << '\n';
    return kExitRuntime;
  }
}

std::vector<double> default_oracle_times(double t_end)
{
  std::vector<double> out;
  for (double decade = 0.01; decade <= t_end * (1 + 1e-12); decade *= 10.0)
    for (double m : {1.0, 2.0, 5.0}) {
      const double t = m * decade;
      if (t < t_end * (1 - 1e-12))
        out.push_back(t);
    }
  if (t_end > 0.0)
    out.push_back(t_end);
  return out;
}

OracleComparison compare_oracle(const ExperimentConfig& cfg)
{
  const FluxFunction flux = cfg.flux.make();
  const Grid2D grid = cfg.grid.make();
  const InitialCondition ic = build_ic(cfg.ic, grid);
  const double rho_cr = flux.rho_cr();
  // The oracle lives in the disk inscribed in the domain.
  const double r_max = std::min({-grid.x_min(), grid.x_max(), -grid.y_min(), grid.y_max()});
  if (!(r_max > 0.0))
    throw UnsupportedIC("compare-oracle: the origin must lie inside the domain");
  if (const std::string why = radial_ic_problem(cfg.ic, ic.scale, rho_cr, r_max); !why.empty())
    throw UnsupportedIC("compare-oracle: " + why);
  const RadialFunction rho0 = radial_profile(cfg.ic, ic.scale);

  OracleComparison cmp;
  cmp.hx = grid.hx();
  cmp.R_inf = r_infinity(rho0, rho_cr, r_max);
  cmp.R_inf_residual = std::abs(disk_average(rho0, cmp.R_inf) - rho_cr);

  std::vector<double> times = cfg.oracle.times.empty() ? default_oracle_times(cfg.t_end) : cfg.oracle.times;
  std::sort(times.begin(), times.end());
  RunOptions opts;
  opts.t_end = cfg.t_end;
  opts.snapshot_times = times;
  opts.hm1_samples = 0;
  opts.segregation_threshold = cfg.segregation_threshold;
  const RunResult run2d = run(ic.field, cfg.stepper, flux, opts);

  RadialFrontState oracle = initial_radial_state(rho0, rho_cr, cfg.oracle.n_cells, r_max);
  const double mass0 = composite_mass(oracle);
  double tau = cfg.stepper.tau_init;
  for (const Snapshot& s : run2d.snapshots) {
    if (s.t <= 0.0)
      continue;
    evolve_radial(oracle, s.t, tau, flux, cfg.stepper);
    cmp.oracle_mass_drift = std::max(cmp.oracle_mass_drift, std::abs(composite_mass(oracle) - mass0) / mass0);
    const ScalarField comp = composite_to_2d(oracle, grid);
    double diff = 0.0, ref = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      diff += std::abs(comp[k] - s.field[k]);
      ref += std::abs(s.field[k]);
    }
    cmp.rows.push_back({s.t, oracle.R, contour_radius(s.field, rho_cr), diff / ref});
  }

  const ScalarField steady = steady_state_radial(rho0, rho_cr, grid, r_max);
  const ScalarField& fin = run2d.final_field;
  double diff = 0.0, ref = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    diff += std::abs(fin[k] - steady[k]);
    ref += std::abs(steady[k]);
  }
  cmp.final_l1_vs_steady = diff / ref;
  cmp.final_R_contour = contour_radius(fin, rho_cr);
  cmp.final_t = run2d.series.empty() ? 0.0 : run2d.series.back().t;
  return cmp;
}

int compare_oracle_command(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                           std::ostream& out, std::ostream& err)
{
  try {
    const OracleComparison cmp = compare_oracle(cfg);
    std::filesystem::create_directories(out_dir);
    {
      std::ofstream csv(out_dir / "oracle.csv");
      csv << "t,R_oracle,R_contour_2d,l1_diff\n";
      for (const OracleRow& r : cmp.rows)
        csv << format_double(r.t) << ',' << format_double(r.R_oracle) << ',' << format_double(r.R_contour_2d)
            << ',' << format_double(r.l1_diff) << '\n';
    }
    double worst_gap = 0.0;
    for (const OracleRow& r : cmp.rows)
      worst_gap = std::max(worst_gap, std::abs(r.R_contour_2d - r.R_oracle));
    const json summary{{"hx", cmp.hx},
                       {"R_inf", cmp.R_inf},
                       {"R_inf_residual", cmp.R_inf_residual},
                       {"final_t", cmp.final_t},
                       {"final_R_contour_2d", cmp.final_R_contour},
                       {"final_R_gap_to_R_inf", std::abs(cmp.final_R_contour - cmp.R_inf)},
                       {"final_l1_vs_steady_state", cmp.final_l1_vs_steady},
                       {"worst_front_gap", worst_gap},
                       {"oracle_mass_drift", cmp.oracle_mass_drift},
                       {"config", config_to_json(cfg)}};
    write_json(out_dir / "oracle_summary.json", summary);
    out << "R_inf " << format_double(cmp.R_inf) << ", final R_contour_2d " << format_double(cmp.final_R_contour)
        << ", final L1 vs steady state " << format_double(cmp.final_l1_vs_steady) << '\n';
    return kExitOk;
  } catch (const UnsupportedIC& e) {
    err << error_json(e.code(), e.what()).dump() << '\n';
    return kExitUnsupportedIc;
  } catch (const ConfigError& e) {
    err << error_json(e.code(), e.what()).dump() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    err << error_json(e.code(), e.what()).dump() << '\n';
    return kExitRuntime;
  }
}

} // namespace ddiff
