#ifndef DDIFF_STENCIL_HPP
#define DDIFF_STENCIL_HPP

#include "ddiff/grid.hpp"

#include <span>
#include <vector>

namespace ddiff {

/// Face diffusivities of a five-point conservative operator. `ax` holds the
/// nx+1 vertical faces of every row (index j*(nx+1)+i is the face left of
/// cell i); `ay` holds the ny+1 horizontal faces of every column (index
/// j*nx+i is the face below cell (i, j)). Boundary faces stay zero, which
/// is the zero-flux wall condition.
struct FaceCoefficients
{
  std::vector<double> ax;
  std::vector<double> ay;
};

/// All interior faces set to one: the plain Neumann Laplacian.
FaceCoefficients unit_face_coefficients(const Grid2D& grid);

/// y = shift * v + scale * A v, where A v = -div(a grad v).
void apply_operator(const Grid2D& grid, const FaceCoefficients& coeffs, double shift, double scale,
                    std::span<const double> v, std::span<double> y);

/// A v for the conservative operator -div(a grad v).
std::vector<double> apply_diffusion(const Grid2D& grid, const FaceCoefficients& coeffs,
                                    std::span<const double> v);

} // namespace ddiff

#endif
