#include "phasebeam/retrieve.hpp"

#include <cmath>
#include <sstream>

#include "fft.hpp"
#include "phasebeam/physics.hpp"

namespace phasebeam::retrieve {

namespace {

constexpr std::size_t kReportedOffenders = 10;

Raster2D normalize(const Raster2D& img, const RetrievalConfig& cfg) {
  const auto v = img.values();
  std::vector<double> out(v.size());
  if (cfg.flat_field) {
    const auto& ff = *cfg.flat_field;
    if (!ff.same_grid(img)) throw InvariantError("flat field grid does not match the image");
    const auto f = ff.values();
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!(f[i] > 0.0)) {
        std::ostringstream os;
        os << "flat field must be > 0 everywhere; pixel " << i << " is " << f[i];
        throw InvariantError(os.str());
      }
      out[i] = v[i] / f[i];
    }
  } else {
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] / cfg.i0;
  }
  return img.with_values(std::move(out), RasterKind::generic);
}

}  // namespace

void RetrievalConfig::validate() const {
  if (!physics::tau_is_usable(tau)) {
    std::ostringstream os;
    os << "retrieval requires tau > 0, got " << tau << " m^2";
    throw InvariantError(os.str());
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvariantError("retrieval requires sigma > 0");
  if (!(i0 > 0.0) || !std::isfinite(i0)) throw InvariantError("retrieval requires i0 > 0");
  if (clamp_epsilon && !(*clamp_epsilon > 0.0)) {
    throw InvariantError("clamp epsilon must be > 0");
  }
}

RetrievalConfig make_config(const Material& mat, const BeamGeometry& geom, double i0,
                            Padding padding) {
  const Material m = mat.at_wavelength(geom.wavelength());
  const double t = physics::tau(m, geom);
  if (!physics::tau_is_usable(t)) {
    std::ostringstream os;
    os << "tau = " << t << " m^2 is not positive: divergence " << geom.divergence()
       << " rad violates the collimation condition";
    throw PhysicsError(os.str());
  }
  RetrievalConfig cfg;
  cfg.tau = t;
  cfg.sigma = m.sigma();
  cfg.i0 = i0;
  cfg.padding = padding;
  return cfg;
}

Raster2D lorentzian_filter(const Raster2D& img, double tau, Padding padding) {
  if (!physics::tau_is_usable(tau)) {
    std::ostringstream os;
    os << "Lorentzian filter requires tau > 0, got " << tau;
    throw InvariantError(os.str());
  }
  return apply_isotropic_symbol(
      img, padding, [tau](double k2) { return 1.0 / (1.0 + tau * k2); }, RasterKind::generic);
}

Retrieval retrieve_density_detailed(const Raster2D& img, const RetrievalConfig& cfg) {
  cfg.validate();
  const auto filtered = lorentzian_filter(normalize(img, cfg), cfg.tau, cfg.padding);
  const double residual = fringe_residual(filtered);
  if (cfg.skip_log_step) return {filtered, 0, residual};

  const auto v = filtered.values();
  const std::size_t w = filtered.width();
  std::vector<double> rho(v.size());
  std::vector<PixelValue> offenders;
  std::size_t bad = 0;
  std::size_t clamped = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    double x = v[i];
    if (cfg.clamp_epsilon) {
      if (x < *cfg.clamp_epsilon) {
        x = *cfg.clamp_epsilon;
        ++clamped;
      }
    } else if (!(x > 0.0)) {
      if (offenders.size() < kReportedOffenders) offenders.push_back({i % w, i / w, x});
      ++bad;
      continue;
    }
    rho[i] = -std::log(x) / cfg.sigma;
  }
  if (bad > 0) throw RetrievalError(std::move(offenders), bad);
  return {filtered.with_values(std::move(rho), RasterKind::projected_density), clamped, residual};
}

Raster2D retrieve_density(const Raster2D& img, const RetrievalConfig& cfg) {
  return retrieve_density_detailed(img, cfg).image;
}

SpectralAverages spectral_averages(const Spectrum& spectrum, const Material& mat,
                                   const BeamGeometry& geom) {
  struct BinTerms {
    double w;
    double sigma;
    double tau;
  };
  std::vector<BinTerms> terms;
  terms.reserve(spectrum.size());
  for (const auto& bin : spectrum.bins()) {
    const double w = bin.weight / spectrum.total_weight();
    if (w == 0.0) continue;
    const Material m = mat.at_wavelength(bin.wavelength);
    const double t = physics::tau(m, geom.with_wavelength(bin.wavelength));
    if (!physics::tau_is_usable(t)) {
      std::ostringstream os;
      os << "tau = " << t << " m^2 at wavelength " << bin.wavelength
         << " m; the poly-energetic filter would be singular";
      throw PhysicsError(os.str());
    }
    terms.push_back({w, m.sigma(), t});
  }

  SpectralAverages avg{0.0, 0.0, 0.0};
  for (const auto& t : terms) {
    avg.sigma_av += t.w * t.sigma;
    avg.sigma_tau_av += t.w * t.sigma * t.tau;
  }
  for (const auto& t : terms) avg.tau_eff += (t.w * t.sigma) / avg.sigma_av * t.tau;
  return avg;
}

Raster2D retrieve_density_poly(const Raster2D& img_av, const SpectralAverages& averages,
                               Padding padding, std::optional<double> clamp_epsilon) {
  RetrievalConfig cfg;
  cfg.tau = averages.tau_eff;
  cfg.sigma = averages.sigma_av;
  cfg.i0 = 1.0;
  cfg.padding = padding;
  cfg.clamp_epsilon = clamp_epsilon;
  return retrieve_density(img_av, cfg);
}

double fringe_residual(const Raster2D& img) {
  const std::size_t nx = img.width();
  const std::size_t ny = img.height();
  detail::RealFft2D fft(nx, ny);
  const auto v = img.values();
  std::copy(v.begin(), v.end(), fft.real().begin());
  fft.forward();
  const auto spec = fft.spectrum();
  const std::size_t nkx = fft.nkx();
  double total = 0.0;
  double high = 0.0;
  for (std::size_t j = 0; j < ny; ++j) {
    const double fy = static_cast<double>(detail::signed_frequency(j, ny)) / static_cast<double>(ny);
    for (std::size_t i = 0; i < nkx; ++i) {
      if (i == 0 && j == 0) continue;
      const double fx = static_cast<double>(i) / static_cast<double>(nx);
      // Columns 1..nx/2-1 stand for a conjugate pair in the full spectrum.
      const bool paired = i > 0 && 2 * i != nx;
      const double e = std::norm(spec[j * nkx + i]) * (paired ? 2.0 : 1.0);
      total += e;
      if (std::hypot(fx, fy) > 0.25) high += e;
    }
  }
  return total > 0.0 ? high / total : 0.0;
}

}  // namespace phasebeam::retrieve
