#include "ddiff/presets.hpp"

#include "ddiff/errors.hpp"

#include <cmath>
#include <numbers>

namespace ddiff {

std::vector<PresetInfo> preset_list()
{
  return {
    {"fig1", "supercritical single Gaussian, exponent -3, rho_inf = 3/2, 400x400 cells"},
    {"fig2", "subcritical Gaussian pair, exponent -16, centers +-(-7/20, 7/20), rho_inf = 3/4, 500x500 cells"},
    {"fig3", "subcritical Gaussian pair, exponent -8, centers +-(3/4, -3/4), rho_inf = 3/10, 500x500 cells"},
    {"radial", "subcritical single Gaussian, exponent -3, rho_inf = 3/4, 200x200 cells (free-boundary comparison)"},
  };
}

ExperimentConfig preset_config(const std::string& name)
{
  ExperimentConfig c;
  c.outputs = "out/" + name;
  c.ic.preset = name;
  // The fixed-point iteration limits tau to O(h^2) near fronts.
  c.stepper.newton = true;
  if (name == "fig1") {
    c.grid.nx = c.grid.ny = 400;
    c.ic.gaussians = {{1.0, -3.0, {0.0, 0.0}}};
    c.ic.rho_inf = 1.5;
    c.t_end = 5.0;
    c.snapshot_times = {0.01, 0.1, 0.5, 1.0, 2.0, 5.0};
  } else if (name == "fig2") {
    c.grid.nx = c.grid.ny = 500;
    c.ic.gaussians = {{1.0, -16.0, {-0.35, 0.35}}, {1.0, -16.0, {0.35, -0.35}}};
    c.ic.rho_inf = 0.75;
    c.t_end = 5.0;
    c.snapshot_times = {0.01, 0.1, 0.5, 1.0, 2.0, 5.0};
  } else if (name == "fig3") {
    c.grid.nx = c.grid.ny = 500;
    c.ic.gaussians = {{1.0, -8.0, {0.75, -0.75}}, {1.0, -8.0, {-0.75, 0.75}}};
    c.ic.rho_inf = 0.3;
    c.t_end = 5.0;
    c.snapshot_times = {0.01, 0.1, 0.5, 1.0, 2.0, 5.0};
  } else if (name == "radial") {
    c.grid.nx = c.grid.ny = 200;
    c.ic.gaussians = {{1.0, -3.0, {0.0, 0.0}}};
    c.ic.rho_inf = 0.75;
    c.t_end = 50.0;
    c.snapshot_times = {0.1, 1.0, 5.0, 10.0, 50.0};
    c.oracle.n_cells = 400;
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  return c;
}

ExperimentConfig with_cells(ExperimentConfig cfg, std::size_t n)
{
  cfg.grid.nx = cfg.grid.ny = n;
  return cfg;
}

double gaussian_profile(const std::vector<GaussianTerm>& terms, double x, double y)
{
  double s = 0.0;
  for (const GaussianTerm& g : terms) {
    const double dx = x - g.center[0], dy = y - g.center[1];
    s += g.amplitude * std::exp(g.exponent * (dx * dx + dy * dy));
  }
  return s;
}

InitialCondition build_ic(const IcSpec& spec, const Grid2D& grid)
{
  if (spec.gaussians.empty())
    throw InvalidArgument("build_ic: no Gaussian terms");
  if (!(spec.rho_inf > 0.0))
    throw InvalidArgument("build_ic: rho_inf must be positive");
  std::vector<double> v(grid.size());
  double sum = 0.0;
  for (std::size_t j = 0; j < grid.ny(); ++j)
    for (std::size_t i = 0; i < grid.nx(); ++i) {
      const double p = gaussian_profile(spec.gaussians, grid.xc(i), grid.yc(j));
      if (!(p > 0.0) || !std::isfinite(p))
        throw NonPositiveProfile("build_ic: profile is not positive at cell (" + std::to_string(i) + ", " +
                                 std::to_string(j) + ")");
      v[grid.index(i, j)] = p;
      sum += p;
    }
  const double scale = spec.rho_inf / (sum / static_cast<double>(grid.size()));
  for (double& x : v)
    x *= scale;
  return {ScalarField(grid, std::move(v)), scale};
}

RadialFunction radial_profile(const IcSpec& spec, double scale)
{
  std::vector<GaussianTerm> terms = spec.gaussians;
  return [terms, scale](double r) { return scale * gaussian_profile(terms, r, 0.0); };
}

std::string radial_ic_problem(const IcSpec& spec, double scale, double rho_cr, double r_max)
{
  const RadialFunction rho0 = radial_profile(spec, scale);
  for (int a = 1; a < 16; ++a) {
    const double theta = 2.0 * std::numbers::pi * a / 16.0;
    for (int k = 1; k <= 32; ++k) {
      const double r = r_max * k / 32.0;
      const double ref = rho0(r);
      const double val = scale * gaussian_profile(spec.gaussians, r * std::cos(theta), r * std::sin(theta));
      if (std::abs(val - ref) > 1e-12 * std::max(1.0, std::abs(ref)))
        return "initial datum is not radially symmetric about the origin";
    }
  }
  double prev = rho0(0.0);
  for (int k = 1; k <= 1000; ++k) {
    const double cur = rho0(r_max * k / 1000.0);
    if (!(cur < prev))
      return "initial datum is not strictly decreasing in the radius";
    prev = cur;
  }
  if (!(rho0(0.0) > rho_cr))
    return "initial datum is not supercritical at the origin";
  if (!(spec.rho_inf < rho_cr))
    return "average density is not subcritical";
  if (!(disk_average(rho0, r_max) < rho_cr))
    return "average over the inscribed disk is not subcritical";
  return {};
}

} // namespace ddiff
