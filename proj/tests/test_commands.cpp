#include "ddiff/commands.hpp"
#include "ddiff/config.hpp"
#include "ddiff/io.hpp"
#include "ddiff/presets.hpp"

#include <doctest.h>

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace ddiff;
namespace fs = std::filesystem;

namespace {

const fs::path kDir = fs::temp_directory_path() / "ddiff_test_commands";

int cli(const std::string& args)
{
  const std::string cmd = std::string(DDIFF_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p)
{
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_series(const fs::path& p, double (*y)(double))
{
  std::vector<SeriesRecord> rows;
  for (int k = 1; k <= 40; ++k) {
    SeriesRecord r;
    r.t = 0.25 * k;
    r.energy = y(r.t);
    r.rel_energy = y(r.t);
    r.pos_l1 = y(r.t);
    rows.push_back(r);
  }
  write_series_csv(p, rows);
}

} // namespace

TEST_CASE("run: exit codes and outputs")
{
  fs::remove_all(kDir);
  const fs::path out = kDir / "run";
  REQUIRE(cli("run --preset fig3 --cells 24 --t-end 0.2 --out " + out.string()) == 0);
  CHECK(fs::exists(out / "series.csv"));
  CHECK(fs::exists(out / "summary.json"));
  const auto cols = read_csv_columns(out / "series.csv");
  const auto& t = cols.at("t");
  for (std::size_t k = 1; k < t.size(); ++k)
    CHECK(t[k] > t[k - 1]);
  CHECK(t.back() == 0.2);
  const auto summary = nlohmann::json::parse(slurp(out / "summary.json"));
  CHECK(summary["status"] == "ok");
  CHECK(summary["audit"]["ok"] == true);
  CHECK(summary["t_end"] == 0.2);

  CHECK(cli("run --config " + (kDir / "missing.json").string()) == kExitConfig);
  CHECK(cli("run --preset nope") == kExitConfig);
  CHECK(cli("run") == kExitConfig);
  CHECK(cli("frobnicate") == kExitConfig);
  CHECK(cli("presets list") == 0);
}

TEST_CASE("run --config reads a JSON file")
{
  fs::create_directories(kDir);
  ExperimentConfig c = with_cells(preset_config("fig1"), 16);
  c.t_end = 0.05;
  c.snapshot_times = {0.0, 0.01};
  c.outputs = (kDir / "cfg_out").string();
  const fs::path path = kDir / "cfg.json";
  std::ofstream(path) << config_to_json(c).dump(2);
  REQUIRE(cli("run --config " + path.string()) == 0);
  CHECK(fs::exists(kDir / "cfg_out" / "snap_0.ddif"));
  CHECK(fs::exists(kDir / "cfg_out" / "snap_0.01.ddif"));
  const SnapshotFile s = read_snapshot(kDir / "cfg_out" / "snap_0.01.ddif");
  CHECK(s.nx == 16);
  CHECK(s.t == 0.01);
}

TEST_CASE("identical runs write identical series")
{
  const fs::path a = kDir / "det_a", b = kDir / "det_b";
  REQUIRE(cli("run --preset fig2 --cells 24 --t-end 0.1 --out " + a.string()) == 0);
  REQUIRE(cli("run --preset fig2 --cells 24 --t-end 0.1 --out " + b.string()) == 0);
  CHECK(slurp(a / "series.csv") == slurp(b / "series.csv"));
}

TEST_CASE("analyze recovers exact rates")
{
  fs::create_directories(kDir);
  const fs::path ex = kDir / "exp.csv", pw = kDir / "pow.csv";
  write_series(ex, [](double t) { return std::exp(-2.0 * t); });
  write_series(pw, [](double t) { return std::pow(t, -3.0); });

  AnalyzeOptions semi;
  semi.columns = {"rel_energy"};
  const auto je = analyze_series(ex, semi);
  CHECK(std::abs(je["fits"]["rel_energy"]["lambda"].get<double>() - 2.0) <= 1e-9);

  AnalyzeOptions loglog;
  loglog.columns = {"energy", "pos_l1"};
  const auto jp = analyze_series(pw, loglog);
  CHECK(std::abs(jp["fits"]["energy"]["slope"].get<double>() + 3.0) <= 1e-9);
  CHECK(std::abs(jp["fits"]["pos_l1"]["slope"].get<double>() + 3.0) <= 1e-9);

  const fs::path out = kDir / "analyze";
  CHECK(cli("analyze --series " + pw.string() + " --columns energy --t-min 2 --out " + out.string()) == 0);
  const auto rates = nlohmann::json::parse(slurp(out / "rates.json"));
  CHECK(std::abs(rates["fits"]["energy"]["slope"].get<double>() + 3.0) <= 1e-9);
  CHECK(rates["fits"]["energy"]["t_lo"].get<double>() >= 2.0);
  CHECK(cli("analyze --series " + (kDir / "none.csv").string()) != 0);
}

TEST_CASE("compare-oracle preconditions")
{
  CHECK(cli("compare-oracle --preset fig2 --cells 20 --t-end 0.1 --out " + (kDir / "o2").string()) ==
        kExitUnsupportedIc);
  const fs::path out = kDir / "o1";
  ExperimentConfig c = with_cells(preset_config("fig1"), 40);
  c.ic.rho_inf = 0.75;
  c.t_end = 0.05;
  c.oracle.n_cells = 100;
  c.outputs = out.string();
  const fs::path path = kDir / "oracle.json";
  std::ofstream(path) << config_to_json(c).dump(2);
  REQUIRE(cli("compare-oracle --config " + path.string()) == 0);
  CHECK(fs::exists(out / "oracle.csv"));
  CHECK(fs::exists(out / "oracle_summary.json"));
}
