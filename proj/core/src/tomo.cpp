#include "phasebeam/tomo.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "fft.hpp"
#include "phasebeam/parallel.hpp"
#include "projector.hpp"

namespace phasebeam::tomo {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kAngleTolerance = 1e-9;

double span_length(AngularSpan span) { return span == AngularSpan::full_0_360 ? 2.0 * kPi : kPi; }

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

void check_uniform(const std::vector<double>& angles, AngularSpan span) {
  const double step = span_length(span) / static_cast<double>(angles.size());
  for (std::size_t i = 0; i < angles.size(); ++i) {
    const double expected = angles.front() + static_cast<double>(i) * step;
    if (std::abs(angles[i] - expected) > kAngleTolerance) {
      std::ostringstream os;
      os << "angles are not uniformly spaced by " << step << " rad over the "
         << to_string(span) << " span (angle " << i << " is " << angles[i] << ", expected "
         << expected << ")";
      throw Error(ErrorCode::nonuniform_angles, os.str());
    }
  }
}

/// Frequency response of the band-limited ramp times the apodisation window,
/// for the rfft bins of a padded row. The ramp is the transform of the
/// sampled spatial kernel h(0) = 1/(4 d^2), h(k odd) = -1/(pi k d)^2, which
/// avoids the DC bias of sampling |nu| directly.
std::vector<double> ramp_response(std::size_t padded, double pitch, FbpFilter filter) {
  detail::RealFft1D fft(padded);
  auto kernel = fft.real();
  std::fill(kernel.begin(), kernel.end(), 0.0);
  kernel[0] = 0.25 / (pitch * pitch);
  for (std::size_t k = 1; k <= padded / 2; k += 2) {
    const double v = -1.0 / (kPi * kPi * static_cast<double>(k * k) * pitch * pitch);
    kernel[k] = v;
    kernel[padded - k] = v;
  }
  fft.forward();
  const auto spec = fft.spectrum();
  const std::size_t nbins = padded / 2 + 1;
  std::vector<double> h(nbins);
  for (std::size_t i = 0; i < nbins; ++i) {
    const double x = static_cast<double>(2 * i) / static_cast<double>(padded);  // nu / nu_max
    double window = 1.0;
    switch (filter) {
      case FbpFilter::ram_lak: break;
      case FbpFilter::shepp_logan: {
        const double a = 0.5 * kPi * x;
        window = a == 0.0 ? 1.0 : std::sin(a) / a;
        break;
      }
      case FbpFilter::cosine: window = std::cos(0.5 * kPi * x); break;
    }
    h[i] = pitch * spec[i].real() * window;
  }
  return h;
}

Error with_projection_index(const Error& e, std::size_t index) {
  std::ostringstream os;
  os << "projection " << index << ": " << e.what();
  return Error(e.code(), os.str());
}

}  // namespace

std::string_view to_string(FbpFilter f) {
  switch (f) {
    case FbpFilter::ram_lak: return "ram_lak";
    case FbpFilter::shepp_logan: return "shepp_logan";
    case FbpFilter::cosine: return "cosine";
  }
  return "ram_lak";
}

std::string_view to_string(AngularSpan s) {
  return s == AngularSpan::full_0_360 ? "full_0_360" : "half_0_180";
}

FbpFilter fbp_filter_from_string(std::string_view name) {
  if (name == "ram_lak") return FbpFilter::ram_lak;
  if (name == "shepp_logan") return FbpFilter::shepp_logan;
  if (name == "cosine") return FbpFilter::cosine;
  throw InvariantError("unknown FBP filter '" + std::string(name) + "'");
}

AngularSpan angular_span_from_string(std::string_view name) {
  if (name == "full_0_360") return AngularSpan::full_0_360;
  if (name == "half_0_180") return AngularSpan::half_0_180;
  throw InvariantError("unknown angular span '" + std::string(name) + "'");
}

std::string_view to_string(PipelineMode m) {
  return m == PipelineMode::phase_retrieved ? "phase_retrieved" : "attenuation_only";
}

PipelineMode pipeline_mode_from_string(std::string_view name) {
  if (name == "phase_retrieved") return PipelineMode::phase_retrieved;
  if (name == "attenuation_only") return PipelineMode::attenuation_only;
  throw InvariantError("unknown pipeline mode '" + std::string(name) + "'");
}

Sinogram::Sinogram(std::vector<double> angles, std::size_t detector_pixels, std::size_t slices,
                   double pitch, std::vector<double> values)
    : angles_(std::move(angles)),
      detector_(detector_pixels),
      slices_(slices),
      pitch_(pitch),
      values_(std::move(values)) {
  if (angles_.empty()) throw InvariantError("sinogram needs at least one angle");
  if (detector_ < 1 || slices_ < 1) throw InvariantError("sinogram dimensions must be >= 1");
  if (!(pitch_ > 0.0) || !std::isfinite(pitch_)) throw InvariantError("sinogram pitch must be > 0");
  for (std::size_t i = 0; i < angles_.size(); ++i) {
    const double a = angles_[i];
    if (!(a >= 0.0 && a < 2.0 * kPi)) {
      throw InvariantError("sinogram angles must lie in [0, 2 pi)");
    }
    if (i > 0 && !(a > angles_[i - 1])) {
      throw InvariantError("sinogram angles must be strictly increasing");
    }
  }
  if (values_.size() != angles_.size() * slices_ * detector_) {
    throw InvariantError("sinogram payload size does not match its dimensions");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw InvariantError("sinogram values must be finite");
  }
}

Sinogram Sinogram::from_projections(const std::vector<Raster2D>& projections,
                                    std::vector<double> angles) {
  if (projections.empty() || projections.size() != angles.size()) {
    throw InvariantError("need one projection per angle");
  }
  const auto& first = projections.front();
  std::vector<double> values;
  values.reserve(projections.size() * first.size());
  for (const auto& p : projections) {
    if (!p.same_grid(first)) throw InvariantError("projections must share one grid");
    values.insert(values.end(), p.values().begin(), p.values().end());
  }
  return Sinogram(std::move(angles), first.width(), first.height(), first.pitch_x(),
                  std::move(values));
}

Raster2D Sinogram::projection(std::size_t angle, RasterKind kind) const {
  const auto begin = values_.begin() + static_cast<std::ptrdiff_t>(angle * slices_ * detector_);
  std::vector<double> v(begin, begin + static_cast<std::ptrdiff_t>(slices_ * detector_));
  return Raster2D(detector_, slices_, pitch_, pitch_, std::move(v), kind);
}

Sinogram Sinogram::slice(std::size_t s) const {
  if (s >= slices_) throw InvariantError("slice index out of range");
  std::vector<double> v;
  v.reserve(angles_.size() * detector_);
  for (std::size_t a = 0; a < angles_.size(); ++a) {
    const auto r = row(a, s);
    v.insert(v.end(), r.begin(), r.end());
  }
  return Sinogram(angles_, detector_, 1, pitch_, std::move(v));
}

std::vector<double> uniform_angles(std::size_t n, AngularSpan span) {
  std::vector<double> a(n);
  const double step = span_length(span) / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) a[i] = static_cast<double>(i) * step;
  return a;
}

Sinogram make_sinogram(const Volume3D& vol, const std::vector<double>& angles,
                       unsigned threads) {
  const std::size_t nx = vol.nx();
  const std::size_t ny = vol.ny();
  const auto slices = detail::extract_xz_slices(vol);
  std::vector<double> values(angles.size() * ny * nx);
  const double pitch = vol.voxel_pitch();
  parallel_for(angles.size(), threads, [&](std::size_t a) {
    for (std::size_t iy = 0; iy < ny; ++iy) {
      auto out = std::span<double>(values).subspan((a * ny + iy) * nx, nx);
      detail::project_slice(slices, nx, vol.nz(), iy, angles[a], out);
      for (double& v : out) v *= pitch;
    }
  });
  return Sinogram(angles, nx, ny, pitch, std::move(values));
}

namespace {

/// Filters every angle of one slice and backprojects onto out (n x n).
void reconstruct_slice(const Sinogram& sino, std::size_t slice, FbpFilter filter,
                       std::span<double> out) {
  const std::size_t n = sino.detector_pixels();
  const std::size_t padded = next_pow2(2 * n);
  const auto response = ramp_response(padded, sino.pitch(), filter);
  detail::RealFft1D fft(padded);

  const std::size_t n_angles = sino.n_angles();
  std::vector<double> filtered(n_angles * n);
  const double norm = 1.0 / static_cast<double>(padded);
  for (std::size_t a = 0; a < n_angles; ++a) {
    auto real = fft.real();
    const auto row = sino.row(a, slice);
    std::copy(row.begin(), row.end(), real.begin());
    std::fill(real.begin() + static_cast<std::ptrdiff_t>(n), real.end(), 0.0);
    fft.forward();
    auto spec = fft.spectrum();
    for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= response[i];
    fft.inverse();
    for (std::size_t i = 0; i < n; ++i) filtered[a * n + i] = real[i] * norm;
  }

  // Half span: weight pi / N. Full span integrates over 2 pi and halves,
  // which is also pi / N.
  const double weight = kPi / static_cast<double>(n_angles);
  const double c0 = 0.5 * static_cast<double>(n - 1);
  std::fill(out.begin(), out.end(), 0.0);
  std::vector<double> xc(n);
  for (std::size_t a = 0; a < n_angles; ++a) {
    const double c = std::cos(sino.angles()[a]);
    const double s = std::sin(sino.angles()[a]);
    const double* q = filtered.data() + a * n;
    for (std::size_t ix = 0; ix < n; ++ix) xc[ix] = (static_cast<double>(ix) - c0) * c + c0;
    for (std::size_t iz = 0; iz < n; ++iz) {
      const double zs = (static_cast<double>(iz) - c0) * s;
      double* dst = out.data() + iz * n;
      for (std::size_t ix = 0; ix < n; ++ix) {
        const double u = xc[ix] - zs;
        // Zero beyond the detector edges, so the interpolant stays continuous.
        if (u <= -1.0 || u >= static_cast<double>(n)) continue;
        const double fl = std::floor(u);
        const double f = u - fl;
        const long i0 = static_cast<long>(fl);
        const double lo = i0 >= 0 ? q[i0] : 0.0;
        const double hi = i0 + 1 < static_cast<long>(n) ? q[i0 + 1] : 0.0;
        dst[ix] += (1.0 - f) * lo + f * hi;
      }
    }
  }
  for (double& v : out) v *= weight;
}

}  // namespace

Raster2D fbp(const Sinogram& sino, FbpFilter filter, AngularSpan span, std::size_t slice) {
  if (slice >= sino.slices()) throw InvariantError("slice index out of range");
  check_uniform(sino.angles(), span);
  const std::size_t n = sino.detector_pixels();
  std::vector<double> out(n * n);
  reconstruct_slice(sino, slice, filter, out);
  return Raster2D(n, n, sino.pitch(), sino.pitch(), std::move(out), RasterKind::generic);
}

Volume3D fbp_volume(const Sinogram& sino, FbpFilter filter, AngularSpan span, unsigned threads) {
  check_uniform(sino.angles(), span);
  const std::size_t n = sino.detector_pixels();
  const std::size_t ny = sino.slices();
  std::vector<std::vector<double>> planes(ny, std::vector<double>(n * n));
  parallel_for(ny, threads, [&](std::size_t s) { reconstruct_slice(sino, s, filter, planes[s]); });

  std::vector<double> density(n * ny * n);
  for (std::size_t iz = 0; iz < n; ++iz) {
    for (std::size_t iy = 0; iy < ny; ++iy) {
      std::copy_n(planes[iy].begin() + static_cast<std::ptrdiff_t>(iz * n), n,
                  density.begin() + static_cast<std::ptrdiff_t>((iz * ny + iy) * n));
    }
  }
  return Volume3D(n, ny, n, sino.pitch(), std::move(density), VolumeKind::reconstruction);
}

Sinogram line_integrals(const std::vector<Raster2D>& projections,
                        const std::vector<double>& angles,
                        const retrieve::RetrievalConfig& cfg, const PipelineOptions& opts) {
  if (projections.empty() || projections.size() != angles.size()) {
    throw InvariantError("need one projection per angle");
  }
  cfg.validate();
  const auto& first = projections.front();
  for (const auto& p : projections) {
    if (!p.same_grid(first)) throw InvariantError("projections must share one grid");
  }
  const double out_scale = opts.scale == DensityScale::sigma_rho ? cfg.sigma : 1.0;

  std::vector<Raster2D> integrals(projections.size(), first);
  parallel_for(projections.size(), opts.threads, [&](std::size_t k) {
    try {
      const auto& img = projections[k];
      if (opts.mode == PipelineMode::phase_retrieved) {
        const auto rho = retrieve::retrieve_density(img, cfg);
        if (out_scale == 1.0) {
          integrals[k] = rho;
          return;
        }
        std::vector<double> v(rho.values().begin(), rho.values().end());
        for (double& x : v) x *= out_scale;
        integrals[k] = rho.with_values(std::move(v), RasterKind::generic);
        return;
      }
      const auto v = img.values();
      const std::size_t w = img.width();
      std::vector<double> out(v.size());
      std::vector<PixelValue> offenders;
      std::size_t bad = 0;
      for (std::size_t i = 0; i < v.size(); ++i) {
        const double ref = cfg.flat_field ? cfg.flat_field->values()[i] : cfg.i0;
        double t = v[i] / ref;
        if (cfg.clamp_epsilon && t < *cfg.clamp_epsilon) t = *cfg.clamp_epsilon;
        if (!(t > 0.0)) {
          if (offenders.size() < 10) offenders.push_back({i % w, i / w, t});
          ++bad;
          continue;
        }
        out[i] = -std::log(t) / cfg.sigma * out_scale;
      }
      if (bad > 0) throw RetrievalError(std::move(offenders), bad, "attenuation log");
      integrals[k] = img.with_values(std::move(out), RasterKind::projected_density);
    } catch (const RetrievalError& e) {
      throw RetrievalError(e.offending(), e.total_offending(),
                           "projection " + std::to_string(k));
    } catch (const Error& e) {
      throw with_projection_index(e, k);
    }
  });
  return Sinogram::from_projections(integrals, angles);
}

Volume3D tomo_pipeline(const std::vector<Raster2D>& projections,
                       const std::vector<double>& angles,
                       const retrieve::RetrievalConfig& cfg, const PipelineOptions& opts) {
  return fbp_volume(line_integrals(projections, angles, cfg, opts), opts.filter, opts.span,
                    opts.threads);
}

}  // namespace phasebeam::tomo
