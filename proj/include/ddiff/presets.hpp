#ifndef DDIFF_PRESETS_HPP
#define DDIFF_PRESETS_HPP

#include "ddiff/config.hpp"
#include "ddiff/freeboundary.hpp"

#include <string>
#include <vector>

namespace ddiff {

struct PresetInfo
{
  std::string name;
  std::string description;
};

std::vector<PresetInfo> preset_list();

/// Full experiment configuration of a named preset. Grids are the
/// recorded full-size ones; shrink them with with_cells(). Throws
/// ConfigError for unknown names.
ExperimentConfig preset_config(const std::string& name);

/// Copy of `cfg` with an n x n grid.
ExperimentConfig with_cells(ExperimentConfig cfg, std::size_t n);

/// Unnormalized profile sum_k A_k exp(e_k |x - c_k|^2).
double gaussian_profile(const std::vector<GaussianTerm>& terms, double x, double y);

struct InitialCondition
{
  ScalarField field;
  double scale = 1.0;  ///< factor applied to the unnormalized profile
};

/// Samples the profile at cell centers and rescales it so that the
/// discrete mean equals rho_inf exactly (up to one rounding).
/// Throws NonPositiveProfile if the profile is <= 0 at any cell.
InitialCondition build_ic(const IcSpec& spec, const Grid2D& grid);

/// The analytic initial datum x -> scale * profile(x) along the positive
/// x-axis, as a radial function.
RadialFunction radial_profile(const IcSpec& spec, double scale);

/// Numerical check that the scaled profile is radial, strictly decreasing
/// on [0, r_max], supercritical at the origin and subcritical on average.
/// Returns an empty string when supported, else the reason.
std::string radial_ic_problem(const IcSpec& spec, double scale, double rho_cr, double r_max);

} // namespace ddiff

#endif
