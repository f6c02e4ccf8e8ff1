#include "ddiff/grid.hpp"

#include "ddiff/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ddiff {

Grid2D::Grid2D(double x_min, double x_max, double y_min, double y_max, std::size_t nx, std::size_t ny)
  : x_min_(x_min), x_max_(x_max), y_min_(y_min), y_max_(y_max), nx_(nx), ny_(ny)
{
  if (nx < 1 || ny < 1)
    throw InvalidArgument("grid: cell counts must be positive");
  if (!(x_max > x_min) || !(y_max > y_min))
    throw InvalidArgument("grid: empty coordinate range");
  hx_ = (x_max - x_min) / static_cast<double>(nx);
  hy_ = (y_max - y_min) / static_cast<double>(ny);
}

Grid2D Grid2D::unit_square(std::size_t n)
{
  return Grid2D(-1.0, 1.0, -1.0, 1.0, n, n);
}

ScalarField::ScalarField(const Grid2D& grid, double value)
  : grid_(grid), data_(grid.size(), value)
{
  validate();
}

ScalarField::ScalarField(const Grid2D& grid, std::vector<double> data)
  : grid_(grid), data_(std::move(data))
{
  if (data_.size() != grid_.size())
    throw InvalidArgument("field: data length does not match grid");
  validate();
}

ScalarField::ScalarField(const Grid2D& grid, std::vector<double> data, Unchecked)
  : grid_(grid), data_(std::move(data))
{
  if (data_.size() != grid_.size())
    throw InvalidArgument("field: data length does not match grid");
}

ScalarField ScalarField::signed_field(const Grid2D& grid, std::vector<double> data)
{
  return ScalarField(grid, std::move(data), Unchecked{});
}

void ScalarField::validate() const
{
  for (std::size_t k = 0; k < data_.size(); ++k) {
    const double v = data_[k];
    if (!std::isfinite(v) || v < 0.0)
      throw InvalidArgument("field: invalid value " + std::to_string(v) + " at cell " + std::to_string(k));
  }
}

double mean(const ScalarField& field)
{
  double s = 0.0;
  for (double v : field.values())
    s += v;
  return s / static_cast<double>(field.grid().size());
}

double lp_norm(const ScalarField& field, double p)
{
  if (!(p >= 1.0))
    throw InvalidArgument("lp_norm: exponent must be >= 1");
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : field.values())
      m = std::max(m, std::abs(v));
    return m;
  }
  double s = 0.0;
  for (double v : field.values())
    s += p == 1.0 ? std::abs(v) : p == 2.0 ? v * v : std::pow(std::abs(v), p);
  s *= field.grid().cell_area();
  return p == 1.0 ? s : p == 2.0 ? std::sqrt(s) : std::pow(s, 1.0 / p);
}

double min_value(const ScalarField& field)
{
  return *std::min_element(field.values().begin(), field.values().end());
}

double max_value(const ScalarField& field)
{
  return *std::max_element(field.values().begin(), field.values().end());
}

ScalarField pos_part_excess(const ScalarField& field, double rho_cr)
{
  std::vector<double> out(field.data());
  for (double& v : out)
    v = std::max(v - rho_cr, 0.0);
  return ScalarField::signed_field(field.grid(), std::move(out));
}

double l2_vec(std::span<const double> v)
{
  double s = 0.0;
  for (double x : v)
    s += x * x;
  return std::sqrt(s);
}

} // namespace ddiff
