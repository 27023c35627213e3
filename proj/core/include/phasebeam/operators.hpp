#pragma once

// Fourier-space and finite-difference image operators used by both the
// forward model and the retrieval filter. Spatial frequencies follow
// k = 2*pi*f, with f in cycles per metre taken from the pixel pitch, so that
// d/dx becomes i*k_x.

#include <functional>
#include <string_view>

#include "phasebeam/core.hpp"

namespace phasebeam {

enum class Padding { mirror2x, none };
enum class LaplacianMode { fourier_symbol, finite_difference_5pt };

std::string_view to_string(Padding p);
std::string_view to_string(LaplacianMode m);
Padding padding_from_string(std::string_view name);
LaplacianMode laplacian_mode_from_string(std::string_view name);

/// Real, even transfer function of |k|^2 (k in rad/m).
using IsotropicSymbol = std::function<double(double k_squared)>;

/// F^-1{ symbol(kx^2 + ky^2) * F[img] }. With Padding::mirror2x the image is
/// half-sample symmetrically extended to twice its size in each direction
/// before transforming, and the original quadrant is cropped afterwards.
Raster2D apply_isotropic_symbol(const Raster2D& img, Padding padding,
                                const IsotropicSymbol& symbol, RasterKind out_kind);

/// 5-point Laplacian with mirror (zero-flux) boundary, in 1/m^2 units.
std::vector<double> finite_difference_laplacian(const Raster2D& img);

/// (1 + coefficient * Laplacian) applied to img.
Raster2D apply_laplacian_operator(const Raster2D& img, double coefficient,
                                  LaplacianMode mode, Padding padding,
                                  RasterKind out_kind);

}  // namespace phasebeam
