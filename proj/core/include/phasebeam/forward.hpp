#pragma once

// Forward simulation: projected density -> contact and propagation-based
// phase-contrast intensity, with source blur, spectral averaging and counting
// noise.

#include <cstdint>

#include "phasebeam/core.hpp"
#include "phasebeam/operators.hpp"

namespace phasebeam::forward {

struct ForwardConfig {
  Material material;
  BeamGeometry geometry;
  double i0 = 1.0;  // expected counts per pixel at unit exposure
  LaplacianMode laplacian_mode = LaplacianMode::fourier_symbol;
  Padding padding = Padding::mirror2x;

  /// Throws InvariantError if i0 is not positive.
  void validate() const;
};

/// Line integral of rho along the beam after rotating the volume by phi about
/// the vertical (y) axis. Ray-driven, bilinear sampling in the xz plane with a
/// one-voxel step; output is nx x ny with the voxel pitch.
Raster2D project_density(const Volume3D& vol, double phi);

/// -b lambda rho_perp, in radians.
Raster2D phase_map(const Raster2D& rho_perp, const Material& mat, double lambda);

/// I0 exp(-sigma rho_perp).
Raster2D contact_intensity(const Raster2D& rho_perp, const ForwardConfig& cfg);

/// I0 (1 - tau Laplacian) exp(-sigma rho_perp) with tau including the
/// source-blur correction. Throws PhysicsError if the sharpening overshoots
/// to negative intensity (phantom too sharp for the model).
Raster2D phase_contrast_forward(const Raster2D& rho_perp, const ForwardConfig& cfg);

/// Same, but with the coherent sharpening and the blur applied as two separate
/// operators, (1 + A/8 Lap)(1 - tau0 Lap), keeping the bi-Laplacian term the
/// single-tau form drops.
Raster2D phase_contrast_forward_two_operator(const Raster2D& rho_perp,
                                             const ForwardConfig& cfg);

/// (1 + A/8 Laplacian) img.
Raster2D source_blur(const Raster2D& img, double area, LaplacianMode mode, Padding padding);

struct PolychromaticImage {
  Raster2D image;         // spectrally averaged I_E / I_0,E
  double max_attenuation; // max over bins and pixels of sigma_E rho_perp
  bool weak_attenuation;  // max_attenuation <= 0.1
};

/// Weight-averaged normalised phase-contrast image over a spectrum. Requires a
/// dispersion table when the spectrum has more than one bin; throws
/// PhysicsError when a bin lies outside it.
PolychromaticImage polychromatic_forward(const Raster2D& rho_perp, const Spectrum& spectrum,
                                         const Material& mat, const BeamGeometry& geom,
                                         LaplacianMode mode = LaplacianMode::fourier_symbol,
                                         Padding padding = Padding::mirror2x);

/// Poisson(value * exposure_scale) / exposure_scale per pixel. Each pixel owns
/// a counter-based random stream keyed by (seed, pixel index), so the result
/// is independent of evaluation order.
Raster2D add_poisson_noise(const Raster2D& img, double exposure_scale, std::uint64_t seed);

/// Independent child seed for stream `stream` (e.g. a projection index).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

}  // namespace phasebeam::forward
