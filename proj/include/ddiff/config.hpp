#ifndef DDIFF_CONFIG_HPP
#define DDIFF_CONFIG_HPP

#include "ddiff/flux.hpp"
#include "ddiff/grid.hpp"
#include "ddiff/stepper.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace ddiff {

/// amplitude * exp(exponent * |x - center|^2)
struct GaussianTerm
{
  double amplitude = 1.0;
  double exponent = -1.0;
  std::array<double, 2> center{0.0, 0.0};

  bool operator==(const GaussianTerm&) const = default;
};

/// Sum of Gaussians rescaled so that the discrete mean equals rho_inf.
/// `preset` records the preset the terms came from, if any.
struct IcSpec
{
  std::string preset;
  std::vector<GaussianTerm> gaussians;
  double rho_inf = 1.0;

  bool operator==(const IcSpec&) const = default;
};

struct FluxParams
{
  double rho_cr = 1.0;
  double kappa = 2.0;
  double scale = 1.0;

  FluxFunction make() const { return FluxFunction(rho_cr, kappa, scale); }
  bool operator==(const FluxParams&) const = default;
};

struct GridParams
{
  double x_min = -1.0, x_max = 1.0, y_min = -1.0, y_max = 1.0;
  std::size_t nx = 100, ny = 100;

  Grid2D make() const { return Grid2D(x_min, x_max, y_min, y_max, nx, ny); }
  bool operator==(const GridParams&) const = default;
};

struct OracleParams
{
  std::size_t n_cells = 400;
  std::vector<double> times;  ///< comparison times; empty selects a default ladder

  bool operator==(const OracleParams&) const = default;
};

struct ExperimentConfig
{
  FluxParams flux;
  GridParams grid;
  IcSpec ic;
  StepperConfig stepper;
  double t_end = 1.0;
  std::vector<double> snapshot_times;
  std::string outputs = "out";
  std::optional<double> segregation_threshold;
  OracleParams oracle;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Strict parse: unknown keys, wrong types, and invalid values raise
/// ConfigError. `ic` may be {"preset": name} or {"gaussians": [...], "rho_inf": v}.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::string& path);

nlohmann::json stepper_to_json(const StepperConfig& s);

} // namespace ddiff

#endif
