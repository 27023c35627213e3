#include "phasebeam/forward.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "phasebeam/physics.hpp"
#include "projector.hpp"

namespace phasebeam::forward {

namespace {

void require_kind(const Raster2D& img, RasterKind kind, const char* what) {
  if (img.kind() != kind) {
    std::ostringstream os;
    os << what << " expects a " << to_string(kind) << " raster, got " << to_string(img.kind());
    throw InvariantError(os.str());
  }
}

Raster2D as_intensity(const Raster2D& img, const char* stage) {
  const auto v = img.values();
  const auto it = std::min_element(v.begin(), v.end());
  if (*it < 0.0) {
    const auto i = static_cast<std::size_t>(it - v.begin());
    std::ostringstream os;
    os << stage << " produced negative intensity " << *it << " at (" << i % img.width() << ","
       << i / img.width() << "); the phantom is too sharp for the linearised propagation model";
    throw PhysicsError(os.str());
  }
  return img.with_kind(RasterKind::intensity);
}

std::vector<double> normalized_contact(const Raster2D& rho_perp, double sigma) {
  const auto rho = rho_perp.values();
  std::vector<double> out(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) out[i] = std::exp(-sigma * rho[i]);
  return out;
}

Raster2D scale(const Raster2D& img, double factor, RasterKind kind) {
  const auto v = img.values();
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = factor * v[i];
  return img.with_values(std::move(out), kind);
}

/// SplitMix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

/// Counter-based generator: a SplitMix64 sequence started from a key.
class StreamRng {
 public:
  using result_type = std::uint64_t;
  explicit StreamRng(std::uint64_t key) noexcept : state_(key) {}
  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }
  result_type operator()() noexcept {
    state_ += kGolden;
    return mix64(state_);
  }

 private:
  std::uint64_t state_;
};

}  // namespace

void ForwardConfig::validate() const {
  if (!(i0 > 0.0) || !std::isfinite(i0)) {
    throw InvariantError("forward config: i0 must be > 0");
  }
}

Raster2D project_density(const Volume3D& vol, double phi) {
  const auto slices = detail::extract_xz_slices(vol);
  std::vector<double> out(vol.nx() * vol.ny());
  for (std::size_t iy = 0; iy < vol.ny(); ++iy) {
    detail::project_slice(slices, vol.nx(), vol.nz(), iy, phi,
                          std::span<double>(out).subspan(iy * vol.nx(), vol.nx()));
  }
  const double pitch = vol.voxel_pitch();
  for (double& v : out) v *= pitch;
  return Raster2D(vol.nx(), vol.ny(), pitch, pitch, std::move(out),
                  RasterKind::projected_density);
}

Raster2D phase_map(const Raster2D& rho_perp, const Material& mat, double lambda) {
  require_kind(rho_perp, RasterKind::projected_density, "phase_map");
  return scale(rho_perp, -mat.b() * lambda, RasterKind::generic);
}

Raster2D contact_intensity(const Raster2D& rho_perp, const ForwardConfig& cfg) {
  cfg.validate();
  require_kind(rho_perp, RasterKind::projected_density, "contact_intensity");
  const Material mat = cfg.material.at_wavelength(cfg.geometry.wavelength());
  auto v = normalized_contact(rho_perp, mat.sigma());
  for (double& x : v) x *= cfg.i0;
  return rho_perp.with_values(std::move(v), RasterKind::intensity);
}

Raster2D phase_contrast_forward(const Raster2D& rho_perp, const ForwardConfig& cfg) {
  cfg.validate();
  require_kind(rho_perp, RasterKind::projected_density, "phase_contrast_forward");
  const Material mat = cfg.material.at_wavelength(cfg.geometry.wavelength());
  const double t = physics::tau(mat, cfg.geometry);
  const auto contact =
      rho_perp.with_values(normalized_contact(rho_perp, mat.sigma()), RasterKind::generic);
  const auto sharpened =
      apply_laplacian_operator(contact, -t, cfg.laplacian_mode, cfg.padding, RasterKind::generic);
  return as_intensity(scale(sharpened, cfg.i0, RasterKind::generic), "phase_contrast_forward");
}

Raster2D phase_contrast_forward_two_operator(const Raster2D& rho_perp,
                                             const ForwardConfig& cfg) {
  cfg.validate();
  require_kind(rho_perp, RasterKind::projected_density, "phase_contrast_forward_two_operator");
  const Material mat = cfg.material.at_wavelength(cfg.geometry.wavelength());
  const double t0 = physics::tau_coherent(mat, cfg.geometry);
  const double area = cfg.geometry.blur_area();
  const auto contact =
      rho_perp.with_values(normalized_contact(rho_perp, mat.sigma()), RasterKind::generic);
  Raster2D out = [&] {
    if (cfg.laplacian_mode == LaplacianMode::fourier_symbol) {
      return apply_isotropic_symbol(
          contact, cfg.padding,
          [t0, area](double k2) { return (1.0 - area / 8.0 * k2) * (1.0 + t0 * k2); },
          RasterKind::generic);
    }
    const auto sharp = apply_laplacian_operator(contact, -t0, cfg.laplacian_mode, cfg.padding,
                                                RasterKind::generic);
    return apply_laplacian_operator(sharp, area / 8.0, cfg.laplacian_mode, cfg.padding,
                                    RasterKind::generic);
  }();
  return as_intensity(scale(out, cfg.i0, RasterKind::generic),
                      "phase_contrast_forward_two_operator");
}

Raster2D source_blur(const Raster2D& img, double area, LaplacianMode mode, Padding padding) {
  if (!(area >= 0.0)) throw InvariantError("blur area must be >= 0");
  if (area == 0.0) return img;
  const auto out = apply_laplacian_operator(img, area / 8.0, mode, padding, RasterKind::generic);
  if (img.kind() == RasterKind::intensity) return as_intensity(out, "source_blur");
  return out.with_kind(img.kind());
}

PolychromaticImage polychromatic_forward(const Raster2D& rho_perp, const Spectrum& spectrum,
                                         const Material& mat, const BeamGeometry& geom,
                                         LaplacianMode mode, Padding padding) {
  require_kind(rho_perp, RasterKind::projected_density, "polychromatic_forward");
  if (spectrum.size() > 1 && !mat.has_dispersion()) {
    throw PhysicsError("polychromatic forward over several bins needs a dispersion table");
  }
  const auto rho = rho_perp.values();
  const double rho_max = *std::max_element(rho.begin(), rho.end());

  std::vector<double> acc(rho.size(), 0.0);
  double max_att = 0.0;
  for (const auto& bin : spectrum.bins()) {
    const Material m = mat.at_wavelength(bin.wavelength);
    max_att = std::max(max_att, m.sigma() * rho_max);
    const double w = bin.weight / spectrum.total_weight();
    if (w == 0.0) continue;
    const ForwardConfig cfg{m, geom.with_wavelength(bin.wavelength), 1.0, mode, padding};
    const auto img = phase_contrast_forward(rho_perp, cfg);
    const auto v = img.values();
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += w * v[i];
  }
  return {rho_perp.with_values(std::move(acc), RasterKind::intensity), max_att, max_att <= 0.1};
}

Raster2D add_poisson_noise(const Raster2D& img, double exposure_scale, std::uint64_t seed) {
  if (!(exposure_scale > 0.0) || !std::isfinite(exposure_scale)) {
    throw InvariantError("exposure scale must be > 0");
  }
  const auto v = img.values();
  std::vector<double> out(v.size());
  const std::uint64_t key = mix64(seed);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] < 0.0) {
      std::ostringstream os;
      os << "cannot draw counts for negative intensity " << v[i] << " at index " << i;
      throw PhysicsError(os.str());
    }
    const double mean = v[i] * exposure_scale;
    if (mean == 0.0) {
      out[i] = 0.0;
      continue;
    }
    StreamRng rng(key ^ mix64(static_cast<std::uint64_t>(i) + kGolden));
    std::poisson_distribution<long long> dist(mean);
    out[i] = static_cast<double>(dist(rng)) / exposure_scale;
  }
  return img.with_values(std::move(out), RasterKind::intensity);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  return mix64(seed + kGolden * (stream + 1));
}

}  // namespace phasebeam::forward
