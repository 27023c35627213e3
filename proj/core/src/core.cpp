#include "phasebeam/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

namespace phasebeam {

namespace {

template <typename... Args>
[[noreturn]] void fail(Args&&... parts) {
  std::ostringstream os;
  (os << ... << parts);
  throw InvariantError(os.str());
}

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

std::string_view to_string(RasterKind kind) {
  switch (kind) {
    case RasterKind::intensity: return "intensity";
    case RasterKind::projected_density: return "projected_density";
    case RasterKind::generic: return "generic";
  }
  return "generic";
}

RasterKind raster_kind_from_string(std::string_view name) {
  if (name == "intensity") return RasterKind::intensity;
  if (name == "projected_density") return RasterKind::projected_density;
  if (name == "generic") return RasterKind::generic;
  fail("unknown raster kind '", name, "'");
}

Raster2D::Raster2D(std::size_t width, std::size_t height, double pitch_x,
                   double pitch_y, std::vector<double> values, RasterKind kind)
    : width_(width),
      height_(height),
      pitch_x_(pitch_x),
      pitch_y_(pitch_y),
      kind_(kind),
      values_(std::move(values)) {
  if (width_ < 1 || height_ < 1) fail("raster must be at least 1x1, got ", width_, "x", height_);
  if (!positive_finite(pitch_x_) || !positive_finite(pitch_y_)) {
    fail("raster pitch must be positive and finite, got ", pitch_x_, ", ", pitch_y_);
  }
  if (values_.size() != width_ * height_) {
    fail("raster holds ", values_.size(), " values, expected ", width_ * height_);
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double v = values_[i];
    if (!std::isfinite(v)) fail("raster value at index ", i, " is not finite");
    if (kind_ == RasterKind::intensity && v < 0.0) {
      fail("intensity raster has negative value ", v, " at (", i % width_, ",", i / width_, ")");
    }
  }
}

Raster2D Raster2D::filled(std::size_t width, std::size_t height, double pitch_x,
                          double pitch_y, double value, RasterKind kind) {
  return Raster2D(width, height, pitch_x, pitch_y,
                  std::vector<double>(width * height, value), kind);
}

Raster2D Raster2D::with_values(std::vector<double> values, RasterKind kind) const {
  return Raster2D(width_, height_, pitch_x_, pitch_y_, std::move(values), kind);
}

Raster2D Raster2D::with_kind(RasterKind kind) const {
  return Raster2D(width_, height_, pitch_x_, pitch_y_, values_, kind);
}

bool Raster2D::same_grid(const Raster2D& other) const noexcept {
  return width_ == other.width_ && height_ == other.height_ &&
         pitch_x_ == other.pitch_x_ && pitch_y_ == other.pitch_y_;
}

double Raster2D::mean() const noexcept {
  return std::accumulate(values_.begin(), values_.end(), 0.0) /
         static_cast<double>(values_.size());
}

Material::Material(double scattering_length_b, double total_cross_section_sigma,
                   std::vector<DispersionEntry> dispersion)
    : b_(scattering_length_b),
      sigma_(total_cross_section_sigma),
      dispersion_(std::move(dispersion)) {
  if (!std::isfinite(b_)) fail("scattering length b must be finite");
  if (!positive_finite(sigma_)) fail("total cross section sigma must be > 0, got ", sigma_);
  for (std::size_t i = 0; i < dispersion_.size(); ++i) {
    const auto& e = dispersion_[i];
    if (!positive_finite(e.wavelength) || !std::isfinite(e.b) || !positive_finite(e.sigma)) {
      fail("dispersion entry ", i, " has non-physical values");
    }
    if (i > 0 && !(e.wavelength > dispersion_[i - 1].wavelength)) {
      fail("dispersion table wavelengths must be strictly increasing (entry ", i, ")");
    }
  }
}

Material Material::at_wavelength(double wavelength) const {
  if (dispersion_.empty()) return Material(b_, sigma_);
  const auto& t = dispersion_;
  if (!(wavelength >= t.front().wavelength && wavelength <= t.back().wavelength)) {
    std::ostringstream os;
    os << "wavelength " << wavelength << " m outside dispersion table ["
       << t.front().wavelength << ", " << t.back().wavelength << "]";
    throw PhysicsError(os.str());
  }
  auto hi = std::lower_bound(t.begin(), t.end(), wavelength,
                             [](const DispersionEntry& e, double w) { return e.wavelength < w; });
  if (hi->wavelength == wavelength) return Material(hi->b, hi->sigma);
  auto lo = hi - 1;
  const double s = (wavelength - lo->wavelength) / (hi->wavelength - lo->wavelength);
  return Material(lo->b + s * (hi->b - lo->b), lo->sigma + s * (hi->sigma - lo->sigma));
}

BeamGeometry::BeamGeometry(double pinhole_d, double source_to_sample_L,
                           double sample_to_detector_delta, double wavelength_lambda,
                           double magnification_M)
    : d_(pinhole_d),
      L_(source_to_sample_L),
      delta_(sample_to_detector_delta),
      lambda_(wavelength_lambda),
      M_(magnification_M) {
  if (!positive_finite(d_)) fail("pinhole diameter d must be > 0, got ", d_);
  if (!positive_finite(L_)) fail("source-to-sample distance L must be > 0, got ", L_);
  if (!std::isfinite(delta_) || delta_ < 0.0) fail("sample-to-detector distance must be >= 0, got ", delta_);
  if (!positive_finite(lambda_)) fail("wavelength must be > 0, got ", lambda_);
  if (!std::isfinite(M_) || M_ < 1.0) fail("magnification must be >= 1, got ", M_);
}

BeamGeometry BeamGeometry::with_wavelength(double wavelength) const {
  return BeamGeometry(d_, L_, delta_, wavelength, M_);
}

BeamGeometry BeamGeometry::with_distance(double delta) const {
  return BeamGeometry(d_, L_, delta, lambda_, M_);
}

BeamGeometry BeamGeometry::with_pinhole(double d) const {
  return BeamGeometry(d, L_, delta_, lambda_, M_);
}

double divergence(const BeamGeometry& geom) noexcept { return geom.divergence(); }
double blur_area(const BeamGeometry& geom) noexcept { return geom.blur_area(); }

Spectrum::Spectrum(std::vector<SpectrumBin> bins) : bins_(std::move(bins)), total_(0.0) {
  if (bins_.empty()) fail("spectrum must have at least one bin");
  for (std::size_t i = 0; i < bins_.size(); ++i) {
    const auto& b = bins_[i];
    if (!positive_finite(b.wavelength)) fail("spectrum bin ", i, " wavelength must be > 0");
    if (!std::isfinite(b.weight) || b.weight < 0.0) fail("spectrum bin ", i, " weight must be >= 0");
    if (i > 0 && !(b.wavelength > bins_[i - 1].wavelength)) {
      fail("spectrum wavelengths must be strictly increasing (bin ", i, ")");
    }
    total_ += b.weight;
  }
  if (!(total_ > 0.0)) fail("spectrum total weight must be > 0");
}

std::string_view to_string(VolumeKind kind) {
  return kind == VolumeKind::density ? "density" : "reconstruction";
}

VolumeKind volume_kind_from_string(std::string_view name) {
  if (name == "density") return VolumeKind::density;
  if (name == "reconstruction") return VolumeKind::reconstruction;
  fail("unknown volume kind '", name, "'");
}

Volume3D::Volume3D(std::size_t nx, std::size_t ny, std::size_t nz, double voxel_pitch,
                   std::vector<double> density, VolumeKind kind)
    : nx_(nx), ny_(ny), nz_(nz), pitch_(voxel_pitch), kind_(kind), density_(std::move(density)) {
  if (nx_ < 1 || ny_ < 1 || nz_ < 1) fail("volume dimensions must be >= 1");
  if (!positive_finite(pitch_)) fail("voxel pitch must be > 0, got ", pitch_);
  if (density_.size() != nx_ * ny_ * nz_) {
    fail("volume holds ", density_.size(), " values, expected ", nx_ * ny_ * nz_);
  }
  for (std::size_t i = 0; i < density_.size(); ++i) {
    if (!std::isfinite(density_[i])) fail("volume value at index ", i, " is not finite");
    if (kind_ == VolumeKind::density && density_[i] < 0.0) {
      fail("volume density at index ", i, " must be >= 0");
    }
  }
}

Volume3D Volume3D::zeros(std::size_t nx, std::size_t ny, std::size_t nz, double voxel_pitch) {
  return Volume3D(nx, ny, nz, voxel_pitch, std::vector<double>(nx * ny * nz, 0.0));
}

Raster2D Volume3D::slice_xz(std::size_t iy) const {
  std::vector<double> v(nx_ * nz_);
  for (std::size_t iz = 0; iz < nz_; ++iz) {
    for (std::size_t ix = 0; ix < nx_; ++ix) v[iz * nx_ + ix] = at(ix, iy, iz);
  }
  return Raster2D(nx_, nz_, pitch_, pitch_, std::move(v), RasterKind::generic);
}

bool Roi::overlaps(const Roi& o) const noexcept {
  return !(x1 < o.x0 || o.x1 < x0 || y1 < o.y0 || o.y1 < y0);
}

void validate_roi(const Roi& roi, const Raster2D& raster) {
  if (roi.x1 < roi.x0 || roi.y1 < roi.y0) fail("ROI bounds are inverted");
  if (roi.x1 >= raster.width() || roi.y1 >= raster.height()) {
    fail("ROI [", roi.x0, ",", roi.y0, "]-[", roi.x1, ",", roi.y1, "] exceeds raster ",
         raster.width(), "x", raster.height());
  }
  if (roi.area() < 2) fail("ROI must contain at least 2 pixels");
}

}  // namespace phasebeam
