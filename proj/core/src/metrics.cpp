#include "phasebeam/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

namespace phasebeam::metrics {

namespace {

std::vector<double> roi_values(const Raster2D& img, const Roi& roi) {
  validate_roi(roi, img);
  std::vector<double> v;
  v.reserve(roi.area());
  for (std::size_t y = roi.y0; y <= roi.y1; ++y) {
    for (std::size_t x = roi.x0; x <= roi.x1; ++x) v.push_back(img(x, y));
  }
  return v;
}

double percentile(std::vector<double> sorted_copy, double p) {
  std::sort(sorted_copy.begin(), sorted_copy.end());
  const double pos = p / 100.0 * static_cast<double>(sorted_copy.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted_copy.size() - 1);
  const double f = pos - static_cast<double>(lo);
  return sorted_copy[lo] + f * (sorted_copy[hi] - sorted_copy[lo]);
}

void check_theta(double theta_used, double theta0) {
  if (!(theta_used > 0.0) || !(theta0 >= theta_used) || !std::isfinite(theta0)) {
    std::ostringstream os;
    os << "boost accounting needs theta0 >= theta_used > 0, got theta_used = " << theta_used
       << ", theta0 = " << theta0;
    throw InvariantError(os.str());
  }
}

}  // namespace

RoiStats roi_stats(const Raster2D& img, const Roi& roi) {
  const auto v = roi_values(img, roi);
  double sum = 0.0;
  for (double x : v) sum += x;
  const double mean = sum / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(v.size() - 1)), v.size()};
}

std::string_view to_string(SnrEstimator e) {
  return e == SnrEstimator::single_roi ? "single_roi" : "difference_of_means";
}

SnrEstimator snr_estimator_from_string(std::string_view name) {
  if (name == "difference_of_means") return SnrEstimator::difference_of_means;
  if (name == "single_roi") return SnrEstimator::single_roi;
  throw InvariantError("unknown SNR estimator '" + std::string(name) + "'");
}

double snr(const Raster2D& img, const Roi& signal, const Roi& background,
           SnrEstimator estimator) {
  const auto s = roi_stats(img, signal);
  if (estimator == SnrEstimator::single_roi) {
    if (s.stddev == 0.0) throw InvariantError("signal ROI has zero standard deviation");
    return std::abs(s.mean) / s.stddev;
  }
  if (signal.overlaps(background)) throw InvariantError("signal and background ROIs overlap");
  const auto b = roi_stats(img, background);
  if (b.stddev == 0.0) throw InvariantError("background ROI has zero standard deviation");
  return std::abs(s.mean - b.mean) / b.stddev;
}

SnrReport snr_boost_from_values(double snr_pre, double snr_post, double theta_used,
                                double theta0) {
  check_theta(theta_used, theta0);
  if (!(snr_pre > 0.0) || !std::isfinite(snr_post)) {
    throw InvariantError("SNR boost needs a positive, finite pre-retrieval SNR");
  }
  SnrReport r{};
  r.snr_pre = snr_pre;
  r.snr_post = snr_post;
  r.snr_boost = snr_post / snr_pre;
  r.collimation_penalty_f = theta_used / theta0;
  r.net_boost = r.snr_boost * r.collimation_penalty_f;
  r.brilliance_boost = r.net_boost * r.net_boost;
  r.theta_used = theta_used;
  r.theta0 = theta0;
  return r;
}

SnrReport snr_boost_report(const Raster2D& pre, const Raster2D& post, const Roi& signal,
                           const Roi& background, double theta_used, double theta0,
                           SnrEstimator estimator) {
  check_theta(theta_used, theta0);
  auto r = snr_boost_from_values(snr(pre, signal, background, estimator),
                                 snr(post, signal, background, estimator), theta_used, theta0);
  r.signal_roi = signal;
  r.background_roi = background;
  r.estimator = estimator;
  r.pre_signal = roi_stats(pre, signal);
  r.pre_background = roi_stats(pre, background);
  r.post_signal = roi_stats(post, signal);
  r.post_background = roi_stats(post, background);
  return r;
}

double michelson_visibility(const Raster2D& img, const Roi& roi, double clip_percentile) {
  if (!(clip_percentile >= 0.0 && clip_percentile < 50.0)) {
    throw InvariantError("clip percentile must lie in [0, 50)");
  }
  const auto v = roi_values(img, roi);
  double lo = 0.0;
  double hi = 0.0;
  if (clip_percentile > 0.0) {
    lo = percentile(v, clip_percentile);
    hi = percentile(v, 100.0 - clip_percentile);
  } else {
    const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
    lo = *mn;
    hi = *mx;
  }
  if (!(hi + lo > 0.0)) {
    std::ostringstream os;
    os << "visibility undefined: max + min = " << hi + lo << " <= 0";
    throw InvariantError(os.str());
  }
  return (hi - lo) / (hi + lo);
}

}  // namespace phasebeam::metrics
