#pragma once

// ROI statistics, SNR and boost accounting, and Michelson visibility.

#include <cstddef>
#include <string_view>

#include "phasebeam/core.hpp"

namespace phasebeam::metrics {

struct RoiStats {
  double mean;
  double stddev;  // unbiased (n - 1)
  std::size_t n;
};

/// Throws InvariantError if the ROI is outside the raster or smaller than 2 px.
RoiStats roi_stats(const Raster2D& img, const Roi& roi);

enum class SnrEstimator {
  /// |mean(signal) - mean(background)| / std(background)
  difference_of_means,
  /// mean(signal) / std(signal); the background ROI is ignored
  single_roi,
};

std::string_view to_string(SnrEstimator e);
SnrEstimator snr_estimator_from_string(std::string_view name);

/// Throws InvariantError for overlapping ROIs and Error(invariant_violation)
/// when the noise estimate is zero.
double snr(const Raster2D& img, const Roi& signal, const Roi& background,
           SnrEstimator estimator = SnrEstimator::difference_of_means);

struct SnrReport {
  double snr_pre;
  double snr_post;
  double snr_boost;
  double collimation_penalty_f;
  double net_boost;
  double brilliance_boost;  // net_boost * net_boost
  // Inputs echoed for provenance.
  double theta_used;
  double theta0;
  Roi signal_roi;
  Roi background_roi;
  SnrEstimator estimator;
  RoiStats pre_signal;
  RoiStats pre_background;
  RoiStats post_signal;
  RoiStats post_background;
};

/// Requires theta0 >= theta_used > 0.
SnrReport snr_boost_report(const Raster2D& pre, const Raster2D& post, const Roi& signal,
                           const Roi& background, double theta_used, double theta0,
                           SnrEstimator estimator = SnrEstimator::difference_of_means);

/// Builds the report from already measured SNR values.
SnrReport snr_boost_from_values(double snr_pre, double snr_post, double theta_used,
                                double theta0);

/// (max - min) / (max + min) over the ROI. With clip_percentile p > 0 the
/// p-th and (100 - p)-th percentiles replace max and min.
double michelson_visibility(const Raster2D& img, const Roi& roi, double clip_percentile = 0.0);

}  // namespace phasebeam::metrics
