#ifndef DDIFF_GRID_HPP
#define DDIFF_GRID_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace ddiff {

/// Uniform cell-centered grid on [x_min, x_max] x [y_min, y_max].
///
/// Cell (i, j) has its center at (x_min + (i + 1/2) hx, y_min + (j + 1/2) hy)
/// and is stored at linear index j * nx + i (row-major, y outermost).
class Grid2D
{
public:
  Grid2D(double x_min, double x_max, double y_min, double y_max, std::size_t nx, std::size_t ny);

  /// The square (-1, 1)^2 with n x n cells.
  static Grid2D unit_square(std::size_t n);

  double x_min() const noexcept { return x_min_; }
  double x_max() const noexcept { return x_max_; }
  double y_min() const noexcept { return y_min_; }
  double y_max() const noexcept { return y_max_; }
  std::size_t nx() const noexcept { return nx_; }
  std::size_t ny() const noexcept { return ny_; }
  std::size_t size() const noexcept { return nx_ * ny_; }
  double hx() const noexcept { return hx_; }
  double hy() const noexcept { return hy_; }
  double cell_area() const noexcept { return hx_ * hy_; }
  double area() const noexcept { return (x_max_ - x_min_) * (y_max_ - y_min_); }

  double xc(std::size_t i) const noexcept { return x_min_ + (static_cast<double>(i) + 0.5) * hx_; }
  double yc(std::size_t j) const noexcept { return y_min_ + (static_cast<double>(j) + 0.5) * hy_; }
  std::size_t index(std::size_t i, std::size_t j) const noexcept { return j * nx_ + i; }

  bool operator==(const Grid2D&) const = default;

private:
  double x_min_, x_max_, y_min_, y_max_;
  std::size_t nx_, ny_;
  double hx_, hy_;
};

/// Nonnegative finite density sampled at cell centers.
class ScalarField
{
public:
  explicit ScalarField(const Grid2D& grid, double value = 0.0);

  /// Throws InvalidArgument unless every value is finite and >= 0.
  ScalarField(const Grid2D& grid, std::vector<double> data);

  /// Skips the nonnegativity check; for signed intermediates (Poisson
  /// right-hand sides, differences) that share the grid layout.
  static ScalarField signed_field(const Grid2D& grid, std::vector<double> data);

  const Grid2D& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return data_; }
  std::span<double> values() noexcept { return data_; }
  const std::vector<double>& data() const noexcept { return data_; }

  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[grid_.index(i, j)]; }
  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[grid_.index(i, j)]; }
  double operator[](std::size_t k) const noexcept { return data_[k]; }
  double& operator[](std::size_t k) noexcept { return data_[k]; }

  /// Throws InvalidArgument if a value is negative or not finite.
  void validate() const;

  bool operator==(const ScalarField&) const = default;

private:
  struct Unchecked {};
  ScalarField(const Grid2D& grid, std::vector<double> data, Unchecked);

  Grid2D grid_;
  std::vector<double> data_;
};

double mean(const ScalarField& field);

/// Midpoint-rule L^p norm; p = infinity gives the max norm. Rejects p < 1.
double lp_norm(const ScalarField& field, double p);

double min_value(const ScalarField& field);
double max_value(const ScalarField& field);

/// Pointwise (v - rho_cr)_+.
ScalarField pos_part_excess(const ScalarField& field, double rho_cr);

/// Euclidean norm of the raw value vector (no cell-area weight).
double l2_vec(std::span<const double> v);

} // namespace ddiff

#endif
