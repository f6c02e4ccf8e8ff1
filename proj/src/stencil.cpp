#include "ddiff/stencil.hpp"

namespace ddiff {

FaceCoefficients unit_face_coefficients(const Grid2D& g)
{
  const std::size_t nx = g.nx(), ny = g.ny();
  FaceCoefficients c;
  c.ax.assign((nx + 1) * ny, 0.0);
  c.ay.assign(nx * (ny + 1), 0.0);
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 1; i < nx; ++i)
      c.ax[j * (nx + 1) + i] = 1.0;
  for (std::size_t j = 1; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i)
      c.ay[j * nx + i] = 1.0;
  return c;
}

void apply_operator(const Grid2D& g, const FaceCoefficients& c, double shift, double scale,
                    std::span<const double> v, std::span<double> y)
{
  const std::size_t nx = g.nx(), ny = g.ny();
  const double wx = scale / (g.hx() * g.hx());
  const double wy = scale / (g.hy() * g.hy());
  for (std::size_t j = 0; j < ny; ++j) {
    const double* axr = c.ax.data() + j * (nx + 1);
    const double* ayb = c.ay.data() + j * nx;
    const double* ayt = c.ay.data() + (j + 1) * nx;
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t k = j * nx + i;
      const double vk = v[k];
      double fx = 0.0;
      if (i + 1 < nx)
        fx += axr[i + 1] * (v[k + 1] - vk);
      if (i > 0)
        fx -= axr[i] * (vk - v[k - 1]);
      double fy = 0.0;
      if (j + 1 < ny)
        fy += ayt[i] * (v[k + nx] - vk);
      if (j > 0)
        fy -= ayb[i] * (vk - v[k - nx]);
      y[k] = shift * vk - (wx * fx + wy * fy);
    }
  }
}

std::vector<double> apply_diffusion(const Grid2D& grid, const FaceCoefficients& coeffs,
                                    std::span<const double> v)
{
  std::vector<double> y(grid.size());
  apply_operator(grid, coeffs, 0.0, 1.0, v, y);
  return y;
}

} // namespace ddiff
