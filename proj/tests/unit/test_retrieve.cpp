#include <gtest/gtest.h>

#include <cstring>

#include "phasebeam/forward.hpp"
#include "phasebeam/metrics.hpp"
#include "phasebeam/physics.hpp"
#include "phasebeam/retrieve.hpp"
#include "test_support.hpp"

using namespace phasebeam;
using namespace phasebeam::retrieve;
using namespace phasebeam::testing;

namespace {

forward::ForwardConfig fwd(double i0, Padding padding) {
  return {reference_material(), reference_geometry(), i0, LaplacianMode::fourier_symbol, padding};
}

RetrievalConfig ret(double i0, Padding padding) {
  return make_config(reference_material(), reference_geometry(), i0, padding);
}

/// Disc of projected density rho with a raised-cosine edge, radius in pixels.
Raster2D disc(std::size_t n, double radius, double rho, double edge = 4.0) {
  std::vector<double> v(n * n);
  const double c = 0.5 * double(n - 1);
  for (std::size_t y = 0; y < n; ++y) {
    for (std::size_t x = 0; x < n; ++x) {
      const double d = std::hypot(double(x) - c, double(y) - c) - radius;
      double s = 1.0;
      if (d >= 0.5 * edge) {
        s = 0.0;
      } else if (d > -0.5 * edge) {
        s = 0.5 * (1.0 - std::sin(kPi * d / edge));
      }
      v[y * n + x] = rho * s;
    }
  }
  return Raster2D(n, n, kPitch, kPitch, std::move(v), RasterKind::projected_density);
}

Raster2D gaussian(std::size_t n, double peak, double width_px) {
  std::vector<double> v(n * n);
  const double c = 0.5 * double(n - 1);
  for (std::size_t y = 0; y < n; ++y) {
    for (std::size_t x = 0; x < n; ++x) {
      const double r2 = (double(x) - c) * (double(x) - c) + (double(y) - c) * (double(y) - c);
      v[y * n + x] = peak * std::exp(-r2 / (2.0 * width_px * width_px));
    }
  }
  return Raster2D(n, n, kPitch, kPitch, std::move(v), RasterKind::projected_density);
}

Material dispersive_material() {
  std::vector<DispersionEntry> table;
  for (int i = 0; i <= 10; ++i) {
    const double lam = 5.0e-10 + 0.2e-10 * i;
    table.push_back({lam, kB * (1.0 + 0.03 * i), kSigma * (0.7 + 0.06 * i)});
  }
  return Material(kB, kSigma, table);
}

Spectrum eight_bins() {
  std::vector<SpectrumBin> bins;
  for (int i = 0; i < 8; ++i) bins.push_back({5.1e-10 + 0.2e-10 * i, 1.0 + 0.5 * std::sin(i)});
  return Spectrum(bins);
}

/// -ln(max(I / i0, floor)) / sigma, the attenuation-only line integral.
Raster2D attenuation_only(const Raster2D& img, double i0, double floor) {
  std::vector<double> v(img.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = -std::log(std::max(img.values()[i] / i0, floor)) / kSigma;
  }
  return img.with_values(std::move(v), RasterKind::generic);
}

}  // namespace

TEST(RetrievalConfig, Validation) {
  RetrievalConfig c = ret(1.0, Padding::none);
  EXPECT_NO_THROW(c.validate());
  c.tau = 0.0;
  EXPECT_THROW(c.validate(), InvariantError);
  c = ret(1.0, Padding::none);
  c.sigma = -1.0;
  EXPECT_THROW(c.validate(), InvariantError);
  c = ret(1.0, Padding::none);
  c.i0 = 0.0;
  EXPECT_THROW(c.validate(), InvariantError);
  c = ret(1.0, Padding::none);
  c.clamp_epsilon = 0.0;
  EXPECT_THROW(c.validate(), InvariantError);
}

TEST(RetrievalConfig, MakeConfigUsesGeometryTau) {
  const auto c = ret(1.2, Padding::mirror2x);
  EXPECT_EQ(c.tau, physics::tau(reference_material(), reference_geometry()));
  EXPECT_EQ(c.sigma, kSigma);
  EXPECT_EQ(c.i0, 1.2);
  const auto g = reference_geometry().with_pinhole(0.2);
  EXPECT_THROW(make_config(reference_material(), g, 1.0), PhysicsError);
}

TEST(LorentzianFilter, RejectsNonPositiveTau) {
  const auto img = random_raster(8, 8, kPitch, 1);
  EXPECT_THROW(lorentzian_filter(img, 0.0, Padding::none), InvariantError);
  EXPECT_THROW(lorentzian_filter(img, -1e-9, Padding::none), InvariantError);
}

TEST(LorentzianFilter, TinyTauIsIdentity) {
  const auto img = random_raster(32, 32, 1.0, 4, 0.5, 1.5);
  for (auto pad : {Padding::none, Padding::mirror2x}) {
    const auto out = lorentzian_filter(img, 1e-30, pad);
    EXPECT_LT(relative_rms(out.values(), img.values()), 1e-9);
  }
}

TEST(LorentzianFilter, ConstantUnchanged) {
  const auto img = Raster2D::filled(30, 22, kPitch, kPitch, 0.75);
  for (auto pad : {Padding::none, Padding::mirror2x}) {
    const auto out = lorentzian_filter(img, 2e-8, pad);
    EXPECT_LT(max_abs_diff(out.values(), img.values()), 1e-15);
  }
}

TEST(LorentzianFilter, SinusoidAmplitude) {
  const std::size_t n = 128;
  const double t = physics::tau(reference_material(), reference_geometry());
  for (double p : {4.0, 8.0, 32.0, 128.0}) {
    std::vector<double> v(n * 4);
    for (std::size_t y = 0; y < 4; ++y) {
      for (std::size_t x = 0; x < n; ++x) v[y * n + x] = std::cos(2.0 * kPi * double(x) / p);
    }
    const Raster2D img(n, 4, kPitch, kPitch, v);
    const auto out = lorentzian_filter(img, t, Padding::none);
    const double gain = 1.0 / (1.0 + 4.0 * kPi * kPi * t / (p * kPitch * p * kPitch));
    for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(out.values()[i], gain * v[i], 1e-12);
  }
}

TEST(RetrieveDensity, FlatImageGivesZero) {
  const auto img = Raster2D::filled(40, 40, kPitch, kPitch, 1.2, RasterKind::intensity);
  const auto rho = retrieve_density(img, ret(1.2, Padding::mirror2x));
  EXPECT_EQ(rho.kind(), RasterKind::projected_density);
  for (double v : rho.values()) EXPECT_NEAR(v, 0.0, 1e-12 / kSigma);
}

TEST(RetrieveDensity, MatchedOperatorRoundTrip) {
  const auto truth = gaussian(64, 2e26, 6.0);
  const auto img = forward::phase_contrast_forward(truth, fwd(1.2, Padding::none));
  const auto rho = retrieve_density(img, ret(1.2, Padding::none));
  EXPECT_LT(relative_rms(rho.values(), truth.values()), 1e-10);
}

TEST(RetrieveDensity, ScaleInvariance) {
  const auto img = forward::phase_contrast_forward(gaussian(32, 1e26, 4.0), fwd(1.0, Padding::mirror2x));
  const auto a = retrieve_density(img, ret(1.0, Padding::mirror2x));
  std::vector<double> scaled(img.size());
  for (std::size_t i = 0; i < scaled.size(); ++i) scaled[i] = 37.5 * img.values()[i];
  const auto b = retrieve_density(img.with_values(scaled, RasterKind::intensity),
                                  ret(37.5, Padding::mirror2x));
  EXPECT_LT(max_abs_diff(a.values(), b.values()), 1e-9 * 1e26 * kPitch);
}

TEST(RetrieveDensity, FlatFieldDivision) {
  const auto truth = gaussian(32, 1e26, 4.0);
  const auto img = forward::phase_contrast_forward(truth, fwd(1.0, Padding::none));
  const auto gain = random_raster(32, 32, kPitch, 6, 0.5, 2.0);
  std::vector<double> measured(img.size());
  for (std::size_t i = 0; i < measured.size(); ++i) measured[i] = img.values()[i] * gain.values()[i];
  auto cfg = ret(1.0, Padding::none);
  cfg.flat_field = gain;
  const auto rho = retrieve_density(img.with_values(measured, RasterKind::intensity), cfg);
  EXPECT_LT(relative_rms(rho.values(), truth.values()), 1e-10);
  cfg.flat_field = Raster2D::filled(4, 4, kPitch, kPitch, 1.0);
  EXPECT_THROW(retrieve_density(img, cfg), InvariantError);
}

TEST(RetrieveDensity, SkipLogReturnsFilteredImage) {
  const auto img = random_raster(16, 16, kPitch, 3, 1.0, 2.0, RasterKind::intensity);
  auto cfg = ret(2.0, Padding::none);
  cfg.skip_log_step = true;
  std::vector<double> half(img.size());
  for (std::size_t i = 0; i < half.size(); ++i) half[i] = img.values()[i] / 2.0;
  const auto expect = lorentzian_filter(img.with_values(half, RasterKind::generic), cfg.tau, Padding::none);
  EXPECT_EQ(max_abs_diff(retrieve_density(img, cfg).values(), expect.values()), 0.0);
}

TEST(RetrieveDensity, NonPositiveFilteredImageListsPixels) {
  std::vector<double> v(16 * 16, 1.0);
  v[5 * 16 + 3] = -50.0;
  const Raster2D img(16, 16, kPitch, kPitch, v, RasterKind::generic);
  try {
    retrieve_density(img, ret(1.0, Padding::none));
    FAIL() << "expected RetrievalError";
  } catch (const RetrievalError& e) {
    EXPECT_EQ(e.code(), ErrorCode::retrieval_nonpositive);
    ASSERT_FALSE(e.offending().empty());
    const auto& px = e.offending();
    EXPECT_TRUE(std::any_of(px.begin(), px.end(), [](const auto& p) { return p.x == 3 && p.y == 5; }));
    for (const auto& p : px) EXPECT_LE(p.value, 0.0);
    EXPECT_GE(e.total_offending(), 1u);
  }
}

TEST(RetrieveDensity, ClampCountsPixels) {
  std::vector<double> v(16 * 16, 1.0);
  v[5 * 16 + 3] = -50.0;
  const Raster2D img(16, 16, kPitch, kPitch, v, RasterKind::generic);
  auto cfg = ret(1.0, Padding::none);
  cfg.clamp_epsilon = 0.1;
  const auto r = retrieve_density_detailed(img, cfg);
  EXPECT_GE(r.clamped_pixels, 1u);
  EXPECT_LE(*std::max_element(r.image.values().begin(), r.image.values().end()),
            -std::log(0.1) / kSigma * (1.0 + 1e-12));
}

TEST(FringeResidual, HighFrequencyContentRaisesIt) {
  const auto smooth = gaussian(64, 1.0, 8.0);
  const auto noisy = random_raster(64, 64, kPitch, 12);
  EXPECT_LT(fringe_residual(smooth), 0.01);
  EXPECT_GT(fringe_residual(noisy), 0.5);
  EXPECT_EQ(fringe_residual(Raster2D::filled(8, 8, 1.0, 1.0, 2.0)), 0.0);
}

TEST(NoiseSuppression, VarianceNonIncreasingInTau) {
  const std::size_t n = 48;
  const auto truth = gaussian(n, 1e26, 6.0);
  const auto clean = forward::phase_contrast_forward(truth, fwd(200.0, Padding::mirror2x));
  const std::vector<double> taus = {0.2e-8, 0.5e-8, 1e-8, 1.82e-8, 4e-8, 1e-7};
  std::vector<double> var(taus.size(), 0.0);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto noisy = forward::add_poisson_noise(clean, 1.0, seed);
    for (std::size_t t = 0; t < taus.size(); ++t) {
      auto cfg = ret(200.0, Padding::mirror2x);
      cfg.tau = taus[t];
      const auto r0 = retrieve_density(clean, cfg);
      const auto r = retrieve_density(noisy, cfg);
      for (std::size_t i = 0; i < r.size(); ++i) {
        const double d = (r.values()[i] - r0.values()[i]) * kSigma;
        var[t] += d * d;
      }
    }
  }
  for (std::size_t t = 1; t < taus.size(); ++t) EXPECT_LT(var[t], var[t - 1]) << t;
}

TEST(NoiseSuppression, ProjectionSnrBoostMatchesNoiseTransferOracle) {
  const std::size_t n = 256;
  const double i0 = 1.2;
  const double att = 0.2;
  const double floor = 0.5 / i0;
  const double t = physics::tau(reference_material(), reference_geometry());

  // Pre image: exact Poisson moments of the clamped log at the two mean counts.
  auto moments = [&](double mu) {
    double m1 = 0.0, m2 = 0.0, p = std::exp(-mu);
    for (int k = 0; k < 80; ++k) {
      const double f = -std::log(std::max(k / i0, floor));
      m1 += p * f;
      m2 += p * f * f;
      p *= mu / (k + 1);
    }
    return std::pair{m1, std::sqrt(m2 - m1 * m1)};
  };
  const auto [bg_mean, bg_sd] = moments(i0);
  const auto [sig_mean, sig_sd] = moments(i0 * std::exp(-att));
  const double snr_pre = (sig_mean - bg_mean) / bg_sd;
  // Post image: white counting noise through the periodic Lorentzian, linearised log.
  double h2 = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    for (std::size_t k = 0; k < n; ++k) {
      const double h = 1.0 / (1.0 + t * dft_k2(k, l, n, n, kPitch));
      h2 += h * h;
    }
  }
  const double snr_post = att / (std::sqrt(h2 / double(n * n)) / std::sqrt(i0));
  const double oracle = snr_post / snr_pre;

  const auto truth = disc(n, 70.0, att / kSigma);
  const auto clean = forward::phase_contrast_forward(truth, fwd(i0, Padding::none));
  const Roi signal{98, 98, 157, 157};
  const Roi background{4, 4, 60, 251};
  double pre_sum = 0.0, post_sum = 0.0;
  const int seeds = 8;
  for (int seed = 1; seed <= seeds; ++seed) {
    const auto noisy = forward::add_poisson_noise(clean, 1.0, std::uint64_t(seed));
    auto cfg = ret(i0, Padding::none);
    cfg.clamp_epsilon = floor;
    post_sum += metrics::snr(retrieve_density(noisy, cfg), signal, background);
    pre_sum += metrics::snr(attenuation_only(noisy, i0, floor), signal, background);
  }
  const double measured = post_sum / pre_sum;
  EXPECT_NEAR(measured / oracle, 1.0, 0.1) << "measured " << measured << ", oracle " << oracle;
  EXPECT_GT(measured, 5.0);
}

TEST(SpectralAverages, SingleBin) {
  const Spectrum s({{kLambda, 2.5}});
  const auto a = spectral_averages(s, reference_material(), reference_geometry());
  const double t = physics::tau(reference_material(), reference_geometry());
  EXPECT_EQ(a.sigma_av, kSigma);
  EXPECT_EQ(a.tau_eff, t);
  EXPECT_NEAR(a.sigma_tau_av, kSigma * t, 1e-15 * kSigma * t);
}

TEST(SpectralAverages, EqualBinsAnyWeights) {
  const Material flat(kB, kSigma, {{0.5e-10, kB, kSigma}, {7e-10, kB, kSigma}});
  const auto g = reference_geometry();
  const Spectrum one({{kLambda, 1.0}});
  const auto ref = spectral_averages(one, flat, g);
  const Spectrum two({{kLambda, 0.3}, {kLambda * 1.0000001, 4.0}});
  const auto a = spectral_averages(two, flat, g);
  EXPECT_NEAR(a.sigma_av, ref.sigma_av, 1e-15 * kSigma);
  EXPECT_NEAR(a.tau_eff, ref.tau_eff, 1e-6 * ref.tau_eff);
}

TEST(SpectralAverages, EightBinBruteForce) {
  const auto mat = dispersive_material();
  const auto g = reference_geometry();
  const auto s = eight_bins();
  long double w_sum = 0.0L, s_sum = 0.0L, st_sum = 0.0L;
  for (const auto& bin : s.bins()) {
    const auto m = mat.at_wavelength(bin.wavelength);
    const long double lam = bin.wavelength;
    const long double theta = g.divergence();
    const long double t = lam * lam * m.b() * kDelta / (2.0L * 3.14159265358979323846L * m.sigma()) -
                          theta * theta * kDelta * kDelta / 8.0L;
    w_sum += bin.weight;
    s_sum += bin.weight * (long double)m.sigma();
    st_sum += bin.weight * (long double)m.sigma() * t;
  }
  const auto a = spectral_averages(s, mat, g);
  EXPECT_NEAR(a.sigma_av, double(s_sum / w_sum), 1e-14 * a.sigma_av);
  EXPECT_NEAR(a.sigma_tau_av, double(st_sum / w_sum), 1e-12 * a.sigma_tau_av);
  EXPECT_NEAR(a.tau_eff, double(st_sum / s_sum), 1e-12 * a.tau_eff);
}

TEST(SpectralAverages, NonPositiveBinTauFails) {
  const Material m(kB, kSigma, {{0.1e-10, kB, kSigma}, {7e-10, kB, kSigma}});
  const Spectrum s({{0.2e-10, 1.0}, {kLambda, 1.0}});
  EXPECT_THROW(spectral_averages(s, m, reference_geometry()), PhysicsError);
}

TEST(PolyRetrieval, SingleBinBitEqualToMono) {
  const auto truth = gaussian(48, 1e26, 5.0);
  const auto img = forward::phase_contrast_forward(truth, fwd(1.0, Padding::mirror2x));
  const Spectrum s({{kLambda, 1.0}});
  const auto avg = spectral_averages(s, reference_material(), reference_geometry());
  const auto poly = retrieve_density_poly(img, avg, Padding::mirror2x);
  const auto mono = retrieve_density(img, ret(1.0, Padding::mirror2x));
  EXPECT_EQ(std::memcmp(poly.values().data(), mono.values().data(), mono.size() * sizeof(double)), 0);
}

TEST(PolyRetrieval, EightBinWeakRoundTripAndStrongDegrades) {
  const auto mat = dispersive_material();
  const auto g = reference_geometry();
  const auto s = eight_bins();
  const auto avg = spectral_averages(s, mat, g);
  double sigma_max = 0.0;
  for (const auto& b : s.bins()) sigma_max = std::max(sigma_max, mat.at_wavelength(b.wavelength).sigma());

  auto error_at = [&](double peak_att) {
    const auto truth = gaussian(64, peak_att / sigma_max, 5.0);
    const auto img = forward::polychromatic_forward(truth, s, mat, g);
    const auto rho = retrieve_density_poly(img.image, avg, Padding::mirror2x);
    return relative_rms(rho.values(), truth.values());
  };
  const double weak = error_at(0.02);
  const double strong = error_at(1.0);
  EXPECT_LE(weak, 0.01);
  EXPECT_GT(strong, weak);
}
