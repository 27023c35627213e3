#pragma once

// Parallel-beam tomography: sinogram synthesis, filtered backprojection, and
// the projection -> (retrieval) -> FBP pipeline.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "phasebeam/core.hpp"
#include "phasebeam/retrieve.hpp"

namespace phasebeam::tomo {

enum class FbpFilter { ram_lak, shepp_logan, cosine };
enum class AngularSpan { half_0_180, full_0_360 };

std::string_view to_string(FbpFilter f);
std::string_view to_string(AngularSpan s);
FbpFilter fbp_filter_from_string(std::string_view name);
AngularSpan angular_span_from_string(std::string_view name);

/// Stack of parallel projections, laid out [angle][slice][detector]. A slice
/// is one detector row, i.e. one plane perpendicular to the rotation axis.
class Sinogram {
 public:
  Sinogram(std::vector<double> angles, std::size_t detector_pixels, std::size_t slices,
           double pitch, std::vector<double> values);

  /// Stacks equally sized rasters; raster row s becomes slice s.
  static Sinogram from_projections(const std::vector<Raster2D>& projections,
                                   std::vector<double> angles);

  std::size_t n_angles() const noexcept { return angles_.size(); }
  const std::vector<double>& angles() const noexcept { return angles_; }
  std::size_t detector_pixels() const noexcept { return detector_; }
  std::size_t slices() const noexcept { return slices_; }
  double pitch() const noexcept { return pitch_; }
  std::span<const double> values() const noexcept { return values_; }

  std::span<const double> row(std::size_t angle, std::size_t slice) const noexcept {
    return std::span<const double>(values_).subspan((angle * slices_ + slice) * detector_,
                                                    detector_);
  }

  /// Projection at one angle as a detector x slices raster.
  Raster2D projection(std::size_t angle, RasterKind kind = RasterKind::generic) const;
  /// One slice across all angles (a classic 2-D sinogram), as a Sinogram.
  Sinogram slice(std::size_t s) const;

 private:
  std::vector<double> angles_;
  std::size_t detector_;
  std::size_t slices_;
  double pitch_;
  std::vector<double> values_;
};

/// n equally spaced angles starting at 0 covering [0, pi) or [0, 2 pi).
std::vector<double> uniform_angles(std::size_t n, AngularSpan span);

/// Projected density of vol at every angle (rows = vol.ny() slices).
Sinogram make_sinogram(const Volume3D& vol, const std::vector<double>& angles,
                       unsigned threads = 1);

/// Ramp-filtered backprojection of one slice onto an N x N grid (N = detector
/// pixels, same pitch). Throws Error(nonuniform_angles) unless the angles are
/// uniformly spaced by span / n_angles.
Raster2D fbp(const Sinogram& sino, FbpFilter filter, AngularSpan span, std::size_t slice = 0);

/// fbp for every slice, stacked into a reconstruction volume (nx = nz = N,
/// ny = slices).
Volume3D fbp_volume(const Sinogram& sino, FbpFilter filter, AngularSpan span,
                    unsigned threads = 1);

enum class PipelineMode { attenuation_only, phase_retrieved };
enum class DensityScale { rho, sigma_rho };

std::string_view to_string(PipelineMode m);
PipelineMode pipeline_mode_from_string(std::string_view name);

struct PipelineOptions {
  PipelineMode mode = PipelineMode::phase_retrieved;
  FbpFilter filter = FbpFilter::ram_lak;
  AngularSpan span = AngularSpan::full_0_360;
  DensityScale scale = DensityScale::rho;
  unsigned threads = 1;
};

/// Per-projection line integrals ready for FBP: -ln(I / I0) / sigma for
/// attenuation_only, retrieve_density for phase_retrieved (times sigma when
/// scale = sigma_rho). Errors are rethrown with the projection index attached.
Sinogram line_integrals(const std::vector<Raster2D>& projections,
                        const std::vector<double>& angles,
                        const retrieve::RetrievalConfig& cfg, const PipelineOptions& opts);

/// line_integrals followed by fbp_volume.
Volume3D tomo_pipeline(const std::vector<Raster2D>& projections,
                       const std::vector<double>& angles,
                       const retrieve::RetrievalConfig& cfg, const PipelineOptions& opts);

}  // namespace phasebeam::tomo
