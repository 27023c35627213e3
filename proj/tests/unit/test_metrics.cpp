#include <gtest/gtest.h>

#include "phasebeam/forward.hpp"
#include "phasebeam/metrics.hpp"
#include "test_support.hpp"

using namespace phasebeam;
using namespace phasebeam::metrics;
using namespace phasebeam::testing;

namespace {

Raster2D two_level(std::size_t n, double inside, double outside, double noise, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, noise);
  std::vector<double> v(n * n);
  for (std::size_t y = 0; y < n; ++y) {
    for (std::size_t x = 0; x < n; ++x) v[y * n + x] = (x < n / 2 ? inside : outside) + g(rng);
  }
  return Raster2D(n, n, 1.0, 1.0, std::move(v));
}

}  // namespace

TEST(RoiStats, Constant) {
  const auto s = roi_stats(Raster2D::filled(10, 10, 1.0, 1.0, 4.5), {2, 2, 6, 5});
  EXPECT_EQ(s.mean, 4.5);
  EXPECT_EQ(s.stddev, 0.0);
  EXPECT_EQ(s.n, 20u);
}

TEST(RoiStats, Checkerboard) {
  std::vector<double> v(8 * 8);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = ((i % 8 + i / 8) % 2) ? 1.0 : 0.0;
  const auto s = roi_stats(Raster2D(8, 8, 1.0, 1.0, v), {0, 0, 7, 7});
  EXPECT_DOUBLE_EQ(s.mean, 0.5);
  // Unbiased: sqrt(64 * 0.25 / 63).
  EXPECT_NEAR(s.stddev, std::sqrt(16.0 / 63.0), 1e-15);
}

TEST(RoiStats, PoissonSpreadMatchesRootMean) {
  const auto img = Raster2D::filled(200, 200, 1.0, 1.0, 9.0, RasterKind::intensity);
  const auto noisy = forward::add_poisson_noise(img, 1.0, 31);
  const auto s = roi_stats(noisy, {0, 0, 199, 199});
  EXPECT_NEAR(s.stddev, 3.0, 0.05 * 3.0);
}

TEST(RoiStats, RejectsBadRois) {
  const auto img = Raster2D::filled(10, 10, 1.0, 1.0, 1.0);
  EXPECT_THROW(roi_stats(img, {0, 0, 10, 2}), InvariantError);
  EXPECT_THROW(roi_stats(img, {3, 3, 3, 3}), InvariantError);
}

TEST(Snr, DifferenceOfMeansDefinition) {
  const auto img = two_level(64, 5.0, 2.0, 0.5, 8);
  const Roi sig{2, 2, 28, 60};
  const Roi bg{36, 2, 61, 60};
  const auto s = roi_stats(img, sig);
  const auto b = roi_stats(img, bg);
  EXPECT_DOUBLE_EQ(snr(img, sig, bg), std::abs(s.mean - b.mean) / b.stddev);
  EXPECT_NEAR(snr(img, sig, bg), 6.0, 0.5);
  EXPECT_DOUBLE_EQ(snr(img, sig, bg, SnrEstimator::single_roi), s.mean / s.stddev);
}

TEST(Snr, ScaleInvariant) {
  const auto img = two_level(32, 3.0, 1.0, 0.3, 2);
  std::vector<double> v(img.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 7.25 * img.values()[i];
  const Roi sig{1, 1, 14, 30};
  const Roi bg{17, 1, 30, 30};
  for (auto e : {SnrEstimator::difference_of_means, SnrEstimator::single_roi}) {
    EXPECT_NEAR(snr(img.with_values(v, RasterKind::generic), sig, bg, e), snr(img, sig, bg, e),
                1e-12 * snr(img, sig, bg, e));
  }
}

TEST(Snr, Errors) {
  const auto img = two_level(32, 3.0, 1.0, 0.3, 2);
  EXPECT_THROW(snr(img, {0, 0, 20, 20}, {10, 10, 30, 30}), InvariantError);
  const auto flat = Raster2D::filled(32, 32, 1.0, 1.0, 1.0);
  EXPECT_THROW(snr(flat, {0, 0, 10, 10}, {20, 20, 30, 30}), InvariantError);
  EXPECT_THROW(snr(flat, {0, 0, 10, 10}, {20, 20, 30, 30}, SnrEstimator::single_roi), InvariantError);
  EXPECT_EQ(snr_estimator_from_string("single_roi"), SnrEstimator::single_roi);
  EXPECT_EQ(snr_estimator_from_string(to_string(SnrEstimator::difference_of_means)),
            SnrEstimator::difference_of_means);
  EXPECT_THROW(snr_estimator_from_string("peak"), InvariantError);
}

TEST(SnrReport, BoostAccounting) {
  const auto r = snr_boost_from_values(2.0, 90.0, 0.004, 0.008);
  EXPECT_EQ(r.snr_boost, 45.0);
  EXPECT_EQ(r.collimation_penalty_f, 0.5);
  EXPECT_EQ(r.net_boost, 22.5);
  EXPECT_EQ(r.brilliance_boost, 506.25);
}

TEST(SnrReport, BrillianceIsSquaredNetBitExact) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.01, 100.0);
  for (int i = 0; i < 200; ++i) {
    const double t0 = u(rng) * 1e-3;
    const auto r = snr_boost_from_values(u(rng), u(rng), t0 * 0.37, t0);
    const double net = r.snr_boost * r.collimation_penalty_f;
    EXPECT_EQ(r.brilliance_boost, net * net);
  }
}

TEST(SnrReport, FromImagesEchoesInputs) {
  const auto pre = two_level(48, 2.0, 1.0, 1.0, 4);
  const auto post = two_level(48, 2.0, 1.0, 0.1, 5);
  const Roi sig{2, 2, 20, 45};
  const Roi bg{26, 2, 45, 45};
  const auto r = snr_boost_report(pre, post, sig, bg, 0.004, 0.008);
  EXPECT_DOUBLE_EQ(r.snr_pre, snr(pre, sig, bg));
  EXPECT_DOUBLE_EQ(r.snr_post, snr(post, sig, bg));
  EXPECT_NEAR(r.snr_boost, 10.0, 2.0);
  EXPECT_EQ(r.signal_roi.x1, 20u);
  EXPECT_EQ(r.background_roi.x0, 26u);
  EXPECT_EQ(r.pre_background.n, bg.area());
  EXPECT_EQ(r.estimator, SnrEstimator::difference_of_means);
  EXPECT_EQ(r.brilliance_boost, r.net_boost * r.net_boost);
}

TEST(SnrReport, ThetaPreconditions) {
  EXPECT_THROW(snr_boost_from_values(1.0, 2.0, 0.0, 0.008), InvariantError);
  EXPECT_THROW(snr_boost_from_values(1.0, 2.0, 0.01, 0.008), InvariantError);
  EXPECT_THROW(snr_boost_from_values(0.0, 2.0, 0.004, 0.008), InvariantError);
  EXPECT_NO_THROW(snr_boost_from_values(1.0, 2.0, 0.008, 0.008));
}

TEST(Visibility, ConstantIsZero) {
  EXPECT_EQ(michelson_visibility(Raster2D::filled(9, 9, 1.0, 1.0, 3.0), {0, 0, 8, 8}), 0.0);
}

TEST(Visibility, FullModulation) {
  std::vector<double> v(64 * 2);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.5 * (1.0 + std::sin(2.0 * kPi * double(i % 64) / 16.0));
  EXPECT_NEAR(michelson_visibility(Raster2D(64, 2, 1.0, 1.0, v), {0, 0, 63, 1}), 1.0, 1e-15);
}

TEST(Visibility, ScalingInvariantOffsetDecreasing) {
  std::vector<double> v(32 * 4);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 2.0 + std::cos(2.0 * kPi * double(i % 32) / 8.0);
  const Raster2D img(32, 4, 1.0, 1.0, v);
  const Roi all{0, 0, 31, 3};
  const double v0 = michelson_visibility(img, all);
  std::vector<double> s(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) s[i] = 13.0 * v[i];
  EXPECT_NEAR(michelson_visibility(img.with_values(s, RasterKind::generic), all), v0, 1e-15);
  double last = v0;
  for (double off : {0.1, 0.5, 2.0, 10.0}) {
    for (std::size_t i = 0; i < v.size(); ++i) s[i] = v[i] + off;
    const double vo = michelson_visibility(img.with_values(s, RasterKind::generic), all);
    EXPECT_LT(vo, last);
    last = vo;
  }
}

TEST(Visibility, ClippingTamesSpikes) {
  std::vector<double> v(100 * 10, 1.0);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 + 0.1 * std::sin(double(i % 100));
  v[55] = 50.0;
  const Raster2D img(100, 10, 1.0, 1.0, v);
  const Roi all{0, 0, 99, 9};
  EXPECT_GT(michelson_visibility(img, all), 0.9);
  EXPECT_LT(michelson_visibility(img, all, 0.5), 0.11);
  EXPECT_THROW(michelson_visibility(img, all, 60.0), InvariantError);
}

TEST(Visibility, NonPositiveSumFails) {
  const Raster2D img(2, 1, 1.0, 1.0, {-1.0, 0.5});
  EXPECT_THROW(michelson_visibility(img, {0, 0, 1, 0}), InvariantError);
}
