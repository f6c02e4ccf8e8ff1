#include "ddiff/config.hpp"
#include "ddiff/errors.hpp"
#include "ddiff/io.hpp"
#include "ddiff/presets.hpp"

#include <doctest.h>

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

using namespace ddiff;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
  const fs::path dir = fs::temp_directory_path() / "ddiff_test_config_io";
  fs::create_directories(dir);
  return dir / name;
}

} // namespace

TEST_CASE("every preset round-trips through JSON")
{
  for (const auto& p : preset_list()) {
    const ExperimentConfig a = preset_config(p.name);
    const nlohmann::json j = config_to_json(a);
    const ExperimentConfig b = config_from_json(j);
    CHECK(a == b);
    CHECK(config_to_json(b) == j);
  }
}

TEST_CASE("custom Gaussian configuration")
{
  const nlohmann::json j = nlohmann::json::parse(R"({
    "flux": {"rho_cr": 1.0, "kappa": 3.0},
    "grid": {"nx": 20, "ny": 30},
    "ic": {"gaussians": [{"amplitude": 2.0, "exponent": -4.0, "center": [0.1, -0.2]}], "rho_inf": 0.5},
    "stepper": {"picard_tol": 1e-8, "newton": true, "anderson_depth": 3},
    "t_end": 2.5,
    "snapshot_times": [0.5, 1.0],
    "segregation_threshold": 0.2
  })");
  const ExperimentConfig c = config_from_json(j);
  CHECK(c.flux.kappa == 3.0);
  CHECK(c.grid.ny == 30);
  CHECK(c.ic.gaussians.size() == 1);
  CHECK(c.ic.gaussians[0].center[1] == -0.2);
  CHECK(c.stepper.picard_tol == 1e-8);
  CHECK(c.stepper.picard_max == StepperConfig{}.picard_max);
  CHECK(c.stepper.newton);
  CHECK(c.stepper.anderson_depth == 3);
  CHECK(*c.segregation_threshold == 0.2);
  CHECK(config_from_json(config_to_json(c)) == c);
}

TEST_CASE("configuration errors")
{
  using nlohmann::json;
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"ic": {"preset": "fig1"}, "bogus": 1})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"ic": {"preset": "nope"}})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"t_end": 1})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"ic": {"preset": "fig1"}, "t_end": "x"})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"ic": {"gaussians": [], "rho_inf": 1}})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"ic": {"preset": "fig1"}, "flux": {"kappa": 1}})")),
                  ConfigError);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"ic": {"preset": "fig1"}, "stepper": {"tau_min": 1}})")),
                  ConfigError);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"ic": {"preset": "fig1"}, "stepper": {"newton": 1}})")),
                  ConfigError);
  CHECK_THROWS_AS(load_config(scratch("missing.json").string()), ConfigError);
}

TEST_CASE("initial conditions hit their target averages")
{
  const Grid2D g = Grid2D::unit_square(100);
  CHECK(mean(build_ic(preset_config("fig1").ic, g).field) == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(mean(build_ic(preset_config("fig2").ic, g).field) == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(mean(build_ic(preset_config("fig3").ic, g).field) == doctest::Approx(0.3).epsilon(1e-14));
  IcSpec zero;
  zero.gaussians = {GaussianTerm{0.0, -1.0, {0.0, 0.0}}};
  zero.rho_inf = 1.0;
  CHECK_THROWS_AS(build_ic(zero, g), NonPositiveProfile);
}

TEST_CASE("preset parameters")
{
  const ExperimentConfig f2 = preset_config("fig2");
  REQUIRE(f2.ic.gaussians.size() == 2);
  CHECK(f2.ic.gaussians[0].exponent == -16.0);
  CHECK(f2.ic.gaussians[0].center[0] == -0.35);
  CHECK(f2.ic.gaussians[0].center[1] == 0.35);
  CHECK(f2.ic.gaussians[1].center[0] == 0.35);
  CHECK(f2.ic.rho_inf == 0.75);
  CHECK(f2.grid.nx == 500);
  const ExperimentConfig f3 = preset_config("fig3");
  CHECK(f3.ic.gaussians[0].exponent == -8.0);
  CHECK(f3.ic.gaussians[0].center[0] == 0.75);
  CHECK(f3.ic.rho_inf == 0.3);
  const ExperimentConfig f1 = preset_config("fig1");
  CHECK(f1.ic.gaussians.size() == 1);
  CHECK(f1.ic.gaussians[0].exponent == -3.0);
  CHECK(f1.ic.rho_inf == 1.5);
  CHECK(f1.grid.nx == 400);
  CHECK(with_cells(f1, 50).grid.ny == 50);
  CHECK(f1.stepper.newton);
  CHECK_THROWS_AS(preset_config("fig9"), ConfigError);
}

TEST_CASE("snapshot files round-trip bitwise")
{
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1e3);
  SnapshotFile s{7, 5, 0.1 + 0.2, {}};
  for (int k = 0; k < 35; ++k)
    s.values.push_back(u(rng));
  s.values[3] = std::numeric_limits<double>::denorm_min();
  s.values[4] = 0.0;
  const fs::path p = scratch("s.ddif");
  write_snapshot(p, s);
  const SnapshotFile r = read_snapshot(p);
  REQUIRE(r.values.size() == s.values.size());
  CHECK(std::memcmp(r.values.data(), s.values.data(), s.values.size() * sizeof(double)) == 0);
  CHECK(std::memcmp(&r.t, &s.t, sizeof(double)) == 0);
  CHECK(r == s);
  CHECK(fs::file_size(p) == 4 + 2 + 4 + 4 + 8 + 35 * 8);

  std::ifstream in(p, std::ios::binary);
  char magic[4];
  in.read(magic, 4);
  CHECK(std::string(magic, 4) == "DDIF");
}

TEST_CASE("malformed snapshot files")
{
  const fs::path p = scratch("bad.ddif");
  {
    std::ofstream out(p, std::ios::binary);
    out << "DDIX";
  }
  CHECK_THROWS_AS(read_snapshot(p), FormatError);
  SnapshotFile s{2, 2, 1.0, {1, 2, 3, 4}};
  write_snapshot(p, s);
  {
    std::ofstream out(p, std::ios::binary | std::ios::app);
    out.put('x');
  }
  CHECK_THROWS_AS(read_snapshot(p), FormatError);
  fs::resize_file(p, 20);
  CHECK_THROWS_AS(read_snapshot(p), FormatError);
  CHECK_THROWS_AS(read_snapshot(scratch("absent.ddif")), FormatError);
}

TEST_CASE("series CSV keeps 17 significant digits")
{
  SeriesRecord a;
  a.t = 0.1;
  a.dt = 1.0 / 3.0;
  a.mass = std::nextafter(1.0, 2.0);
  a.n_components = 2;
  SeriesRecord b = a;
  b.t = 0.2;
  b.hm1_sq = 1e-300;
  const fs::path p = scratch("series.csv");
  write_series_csv(p, {a, b});
  std::ifstream in(p);
  std::string header;
  std::getline(in, header);
  CHECK(header == kSeriesHeader);
  const auto cols = read_csv_columns(p);
  CHECK(cols.at("t")[0] == 0.1);
  CHECK(cols.at("dt")[0] == 1.0 / 3.0);
  CHECK(cols.at("mass")[0] == std::nextafter(1.0, 2.0));
  CHECK(std::isnan(cols.at("hm1_sq")[0]));
  CHECK(cols.at("hm1_sq")[1] == 1e-300);
  CHECK(cols.at("n_components")[1] == 2.0);
}

TEST_CASE("a modified preset datum is written out explicitly")
{
  ExperimentConfig c = preset_config("fig1");
  CHECK(config_to_json(c)["ic"].contains("preset"));
  c.ic.rho_inf = 0.75;
  const nlohmann::json j = config_to_json(c);
  CHECK_FALSE(j["ic"].contains("preset"));
  const ExperimentConfig back = config_from_json(j);
  CHECK(back.ic.rho_inf == 0.75);
  CHECK(back.ic.gaussians == c.ic.gaussians);
}
