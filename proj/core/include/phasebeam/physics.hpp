#pragma once

// Closed-form design formulas for propagation-based neutron phase contrast:
// optical constants, the retrieval-filter parameter tau, collimation limits,
// SNR gain and effective-brilliance accounting, and near-field validity.
// All functions are pure. Lengths use the effective propagation distance
// Delta / M throughout.

#include <string>
#include <vector>

#include "phasebeam/core.hpp"

namespace phasebeam::physics {

/// delta = b * rho * lambda^2 / (2 pi).
double refractive_decrement(const Material& mat, double rho, double lambda);

/// mu = sigma * rho.
double attenuation_coefficient(const Material& mat, double rho);

/// Phase-contrast strength before source blurring: lambda^2 b Delta / (2 pi sigma).
double tau_coherent(const Material& mat, const BeamGeometry& geom);

/// Filter parameter lambda^2 b Delta / (2 pi sigma) - A / 8. May be <= 0; callers
/// that need a usable filter must check (see tau_is_usable).
double tau(const Material& mat, const BeamGeometry& geom);
bool tau_is_usable(double tau_value) noexcept;

/// 2 lambda sqrt(b / (pi sigma Delta)). Throws PhysicsError
/// (collimation_undefined) when b <= 0 or Delta_eff == 0.
double theta_critical(const Material& mat, const BeamGeometry& geom);

/// theta_critical / sqrt(3): maximiser of tau(Theta) * Theta.
double theta_optimum(const Material& mat, const BeamGeometry& geom);

enum class GainForm {
  /// b lambda / (2 sigma) - pi A / (8 lambda Delta), i.e. 0.3 x 4 taken as 1.
  simplified,
  /// Same expression scaled by 1.2, keeping the 0.3 delta/beta prefactor.
  prefactor_0_3,
};

/// Maximum tomographic SNR gain of the retrieval step at the geometry's own
/// divergence. Throws PhysicsError when the blur-corrected gain is <= 0.
double snr_gain_max(const Material& mat, const BeamGeometry& geom,
                    GainForm form = GainForm::simplified);

/// Gain with blur ignored (A = 0): b lambda / (2 sigma).
double snr_gain_unblurred(const Material& mat, const BeamGeometry& geom);

struct BrillianceBoost {
  double value;
  bool boosts;  // value > 1
};

/// Net effective-brilliance boost f^2 G^2 for the geometry's own blur area,
/// relative to an attenuation-imaging divergence theta0.
BrillianceBoost brilliance_boost_max(const Material& mat, const BeamGeometry& geom,
                                     double theta0);

/// Same quantity evaluated at Theta = theta_optimum:
/// 4 b^3 lambda^4 / (9 pi sigma^3 Delta theta0^2).
BrillianceBoost brilliance_boost_at_optimum(const Material& mat, const BeamGeometry& geom,
                                            double theta0);

/// Largest theta0 for which the optimum-collimation boost still exceeds 1.
double brilliance_theta0_limit(const Material& mat, const BeamGeometry& geom);

/// Penumbral resolution d * Delta_eff / L.
double penumbral_resolution(const BeamGeometry& geom);

enum class FresnelRegime { valid, marginal, invalid };
std::string to_string(FresnelRegime regime);

struct FresnelCheck {
  double number;
  FresnelRegime regime;  // valid: N_F >= 10; marginal: 1 < N_F < 10
  bool valid() const noexcept { return regime == FresnelRegime::valid; }
};

inline constexpr double kFresnelValidThreshold = 10.0;

/// N_F = R^2 / (lambda Delta_eff). Throws PhysicsError when Delta_eff = 0.
FresnelCheck fresnel_number(const BeamGeometry& geom);

/// sqrt(tau). Throws PhysicsError when tau <= 0.
double sharpening_length(const Material& mat, const BeamGeometry& geom);

struct VisibilityPrediction {
  double v_abs;
  double v_prop;
  double ratio;
  bool weak_attenuation;  // rho0 * sigma <= 0.1
};

/// Michelson visibilities of a sinusoidal grating rho0 (sin(2 pi x / p) + 1)
/// in contact and after propagation, to first order in rho0 * sigma.
VisibilityPrediction visibility_prediction(double rho0, double sigma, double tau_value,
                                           double period);

struct DesignReport {
  double divergence;
  double theta_critical;
  double theta_optimum;
  double tau;
  double tau_coherent;
  double sharpening_length;  // 0 when tau <= 0
  double resolution;
  double fresnel_number;
  FresnelRegime fresnel_regime;
  double g_max;              // 0 when the blurred gain is not positive
  double g_max_unblurred;
  double theta0;
  double b_max;              // at the geometry's own divergence
  double b_max_at_optimum;
  double theta0_limit;
  std::vector<std::string> flags;
};

/// Evaluates everything above for one material/geometry. Throws PhysicsError
/// (collimation_undefined) when b <= 0, since no collimation condition exists.
DesignReport design_report(const Material& mat, const BeamGeometry& geom, double theta0);

}  // namespace phasebeam::physics
