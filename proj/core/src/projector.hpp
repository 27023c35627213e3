#pragma once

// Parallel-beam ray-driven projector shared by forward::project_density and
// the tomography module. Coordinates are in voxel units about the volume
// centre; for rotation angle phi a point (x, z) lands on detector coordinate
// u = x cos(phi) - z sin(phi).

#include <cstddef>
#include <span>
#include <vector>

#include "phasebeam/core.hpp"

namespace phasebeam::detail {

/// Copies every xz plane into a contiguous block: slices[iy][iz * nx + ix].
std::vector<std::vector<double>> extract_xz_slices(const Volume3D& vol);

/// Unscaled ray sums (in voxel-step units) for plane iy at angle phi; out has
/// nx entries.
void project_slice(const std::vector<std::vector<double>>& slices, std::size_t nx,
                   std::size_t nz, std::size_t iy, double phi, std::span<double> out);

/// Bilinear sample of an nx x nz plane at fractional (x, z); zero outside.
double sample_bilinear(std::span<const double> plane, std::size_t nx, std::size_t nz,
                       double x, double z) noexcept;

}  // namespace phasebeam::detail
