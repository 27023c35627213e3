#pragma once

// Domain value types shared by every stage of the pipeline. All quantities are
// SI base units (metres, square metres, radians, nuclei per cubic metre).
// Every type validates on construction and is immutable afterwards.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "phasebeam/errors.hpp"

namespace phasebeam {

enum class RasterKind { intensity, projected_density, generic };

std::string_view to_string(RasterKind kind);
RasterKind raster_kind_from_string(std::string_view name);

/// Real-valued image on a uniform grid. Row-major, x fastest.
class Raster2D {
 public:
  Raster2D(std::size_t width, std::size_t height, double pitch_x, double pitch_y,
           std::vector<double> values, RasterKind kind = RasterKind::generic);

  static Raster2D filled(std::size_t width, std::size_t height, double pitch_x,
                         double pitch_y, double value,
                         RasterKind kind = RasterKind::generic);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return values_.size(); }
  double pitch_x() const noexcept { return pitch_x_; }
  double pitch_y() const noexcept { return pitch_y_; }
  RasterKind kind() const noexcept { return kind_; }
  std::span<const double> values() const noexcept { return values_; }

  double operator()(std::size_t x, std::size_t y) const noexcept {
    return values_[y * width_ + x];
  }

  /// Same grid, new pixel data.
  Raster2D with_values(std::vector<double> values, RasterKind kind) const;
  Raster2D with_kind(RasterKind kind) const;

  bool same_grid(const Raster2D& other) const noexcept;
  double mean() const noexcept;

 private:
  std::size_t width_;
  std::size_t height_;
  double pitch_x_;
  double pitch_y_;
  RasterKind kind_;
  std::vector<double> values_;
};

struct DispersionEntry {
  double wavelength;  // m
  double b;           // m
  double sigma;       // m^2
};

/// Single-material nuclear properties: coherent scattering length b and total
/// cross section sigma, optionally tabulated against wavelength.
class Material {
 public:
  Material(double scattering_length_b, double total_cross_section_sigma,
           std::vector<DispersionEntry> dispersion = {});

  double b() const noexcept { return b_; }
  double sigma() const noexcept { return sigma_; }
  const std::vector<DispersionEntry>& dispersion() const noexcept {
    return dispersion_;
  }
  bool has_dispersion() const noexcept { return !dispersion_.empty(); }

  /// Material evaluated at one wavelength. Without a table this is the nominal
  /// (b, sigma); with a table, linear interpolation. Throws PhysicsError when
  /// the wavelength lies outside the table.
  Material at_wavelength(double wavelength) const;

 private:
  double b_;
  double sigma_;
  std::vector<DispersionEntry> dispersion_;
};

/// Pinhole-collimated parallel-ish beam, sample, and detector.
class BeamGeometry {
 public:
  BeamGeometry(double pinhole_d, double source_to_sample_L,
               double sample_to_detector_delta, double wavelength_lambda,
               double magnification_M = 1.0);

  double pinhole_d() const noexcept { return d_; }
  double source_to_sample() const noexcept { return L_; }
  double sample_to_detector() const noexcept { return delta_; }
  double magnification() const noexcept { return M_; }
  double wavelength() const noexcept { return lambda_; }

  /// Theta = d / L.
  double divergence() const noexcept { return d_ / L_; }
  /// Delta / M (Fresnel scaling); equals Delta bit-for-bit when M = 1.
  double effective_distance() const noexcept { return delta_ / M_; }
  /// (Theta * Delta_eff)^2.
  double blur_area() const noexcept {
    const double w = divergence() * effective_distance();
    return w * w;
  }

  BeamGeometry with_wavelength(double wavelength) const;
  BeamGeometry with_distance(double delta) const;
  BeamGeometry with_pinhole(double d) const;

 private:
  double d_;
  double L_;
  double delta_;
  double lambda_;
  double M_;
};

double divergence(const BeamGeometry& geom) noexcept;
double blur_area(const BeamGeometry& geom) noexcept;

struct SpectrumBin {
  double wavelength;  // m
  double weight;      // relative detected intensity
};

class Spectrum {
 public:
  explicit Spectrum(std::vector<SpectrumBin> bins);

  const std::vector<SpectrumBin>& bins() const noexcept { return bins_; }
  std::size_t size() const noexcept { return bins_.size(); }
  double total_weight() const noexcept { return total_; }

 private:
  std::vector<SpectrumBin> bins_;
  double total_;
};

/// Phantoms hold physical number densities (>= 0). Reconstructions may dip
/// below zero through filtering and noise, so only finiteness is enforced.
enum class VolumeKind { density, reconstruction };

std::string_view to_string(VolumeKind kind);
VolumeKind volume_kind_from_string(std::string_view name);

/// Voxelised number density rho(x, y, z). Index (ix, iy, iz) maps to
/// (iz * ny + iy) * nx + ix. y is the tomographic rotation axis, z the beam.
class Volume3D {
 public:
  Volume3D(std::size_t nx, std::size_t ny, std::size_t nz, double voxel_pitch,
           std::vector<double> density, VolumeKind kind = VolumeKind::density);

  static Volume3D zeros(std::size_t nx, std::size_t ny, std::size_t nz,
                        double voxel_pitch);

  std::size_t nx() const noexcept { return nx_; }
  std::size_t ny() const noexcept { return ny_; }
  std::size_t nz() const noexcept { return nz_; }
  double voxel_pitch() const noexcept { return pitch_; }
  VolumeKind kind() const noexcept { return kind_; }
  std::span<const double> density() const noexcept { return density_; }

  double at(std::size_t ix, std::size_t iy, std::size_t iz) const noexcept {
    return density_[(iz * ny_ + iy) * nx_ + ix];
  }

  /// The xz plane at height iy as a raster (x across, z down).
  Raster2D slice_xz(std::size_t iy) const;

 private:
  std::size_t nx_;
  std::size_t ny_;
  std::size_t nz_;
  double pitch_;
  VolumeKind kind_;
  std::vector<double> density_;
};

/// Inclusive pixel rectangle.
struct Roi {
  std::size_t x0;
  std::size_t y0;
  std::size_t x1;
  std::size_t y1;

  std::size_t width() const noexcept { return x1 - x0 + 1; }
  std::size_t height() const noexcept { return y1 - y0 + 1; }
  std::size_t area() const noexcept { return width() * height(); }
  bool overlaps(const Roi& other) const noexcept;
};

/// Throws InvariantError if the ROI is inverted, outside the raster, or holds
/// fewer than two pixels.
void validate_roi(const Roi& roi, const Raster2D& raster);

}  // namespace phasebeam
