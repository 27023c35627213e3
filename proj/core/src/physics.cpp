#include "phasebeam/physics.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace phasebeam::physics {

namespace {

constexpr double kPi = std::numbers::pi;

void require_positive_b(const Material& mat) {
  if (!(mat.b() > 0.0)) {
    std::ostringstream os;
    os << "collimation condition undefined for scattering length b = " << mat.b()
       << " m (requires b > 0)";
    throw PhysicsError(os.str(), ErrorCode::collimation_undefined);
  }
}

void require_propagation(const BeamGeometry& geom) {
  if (!(geom.effective_distance() > 0.0)) {
    throw PhysicsError("effective propagation distance is zero",
                       ErrorCode::collimation_undefined);
  }
}

void require_theta0(double theta0) {
  if (!(theta0 > 0.0) || !std::isfinite(theta0)) {
    std::ostringstream os;
    os << "reference divergence theta0 must be > 0, got " << theta0;
    throw PhysicsError(os.str());
  }
}

/// The blurred gain, or exactly 0 when the blur term cancels the coherent
/// term to within rounding.
double gain_expression(const Material& mat, const BeamGeometry& geom) {
  const double lambda = geom.wavelength();
  const double coherent = mat.b() * lambda / (2.0 * mat.sigma());
  const double g = coherent - kPi * geom.blur_area() / (8.0 * lambda * geom.effective_distance());
  return std::abs(g) <= 1e-12 * std::abs(coherent) ? 0.0 : g;
}

}  // namespace

double refractive_decrement(const Material& mat, double rho, double lambda) {
  return mat.b() * rho * lambda * lambda / (2.0 * kPi);
}

double attenuation_coefficient(const Material& mat, double rho) { return mat.sigma() * rho; }

double tau_coherent(const Material& mat, const BeamGeometry& geom) {
  const double lambda = geom.wavelength();
  return lambda * lambda * mat.b() * geom.effective_distance() / (2.0 * kPi * mat.sigma());
}

double tau(const Material& mat, const BeamGeometry& geom) {
  return tau_coherent(mat, geom) - geom.blur_area() / 8.0;
}

bool tau_is_usable(double tau_value) noexcept {
  return std::isfinite(tau_value) && tau_value > 0.0;
}

double theta_critical(const Material& mat, const BeamGeometry& geom) {
  require_positive_b(mat);
  require_propagation(geom);
  return 2.0 * geom.wavelength() *
         std::sqrt(mat.b() / (kPi * mat.sigma() * geom.effective_distance()));
}

double theta_optimum(const Material& mat, const BeamGeometry& geom) {
  return theta_critical(mat, geom) / std::sqrt(3.0);
}

double snr_gain_unblurred(const Material& mat, const BeamGeometry& geom) {
  return mat.b() * geom.wavelength() / (2.0 * mat.sigma());
}

double snr_gain_max(const Material& mat, const BeamGeometry& geom, GainForm form) {
  require_propagation(geom);
  const double g = gain_expression(mat, geom);
  if (!(g > 0.0)) {
    std::ostringstream os;
    os << "no retrieval SNR gain possible at this blur (G = " << g << ")";
    throw PhysicsError(os.str());
  }
  return form == GainForm::prefactor_0_3 ? 1.2 * g : g;
}

BrillianceBoost brilliance_boost_max(const Material& mat, const BeamGeometry& geom,
                                     double theta0) {
  require_theta0(theta0);
  require_positive_b(mat);
  require_propagation(geom);
  const double lambda = geom.wavelength();
  const double delta = geom.effective_distance();
  const double b = mat.b();
  const double sigma = mat.sigma();
  const double bracket = b * lambda / sigma - kPi * geom.blur_area() / (4.0 * lambda * delta);
  const double value =
      b * lambda * lambda / (kPi * sigma * delta * theta0 * theta0) * bracket * bracket;
  return {value, value > 1.0};
}

BrillianceBoost brilliance_boost_at_optimum(const Material& mat, const BeamGeometry& geom,
                                            double theta0) {
  require_theta0(theta0);
  require_positive_b(mat);
  require_propagation(geom);
  const double lambda = geom.wavelength();
  const double b = mat.b();
  const double sigma = mat.sigma();
  const double l2 = lambda * lambda;
  const double value = 4.0 * b * b * b * l2 * l2 /
                       (9.0 * kPi * sigma * sigma * sigma * geom.effective_distance() *
                        theta0 * theta0);
  return {value, value > 1.0};
}

double brilliance_theta0_limit(const Material& mat, const BeamGeometry& geom) {
  // B(theta0) = K / theta0^2, so B > 1  <=>  theta0 < sqrt(K).
  return std::sqrt(brilliance_boost_at_optimum(mat, geom, 1.0).value);
}

double penumbral_resolution(const BeamGeometry& geom) {
  return geom.pinhole_d() * geom.effective_distance() / geom.source_to_sample();
}

std::string to_string(FresnelRegime regime) {
  switch (regime) {
    case FresnelRegime::valid: return "valid";
    case FresnelRegime::marginal: return "marginal";
    case FresnelRegime::invalid: return "invalid";
  }
  return "invalid";
}

FresnelCheck fresnel_number(const BeamGeometry& geom) {
  if (!(geom.effective_distance() > 0.0)) {
    throw PhysicsError("Fresnel number undefined for zero propagation distance");
  }
  const double r = penumbral_resolution(geom);
  const double nf = r * r / (geom.wavelength() * geom.effective_distance());
  FresnelRegime regime = FresnelRegime::invalid;
  if (nf >= kFresnelValidThreshold) {
    regime = FresnelRegime::valid;
  } else if (nf > 1.0) {
    regime = FresnelRegime::marginal;
  }
  return {nf, regime};
}

double sharpening_length(const Material& mat, const BeamGeometry& geom) {
  const double t = tau(mat, geom);
  if (!tau_is_usable(t)) {
    std::ostringstream os;
    os << "sharpening length undefined for tau = " << t << " m^2";
    throw PhysicsError(os.str());
  }
  return std::sqrt(t);
}

VisibilityPrediction visibility_prediction(double rho0, double sigma, double tau_value,
                                           double period) {
  if (!(period > 0.0)) throw PhysicsError("grating period must be > 0");
  const double contrast = rho0 * sigma;
  const double ratio = 1.0 + 4.0 * kPi * kPi * tau_value / (period * period);
  return {contrast, contrast * ratio, ratio, contrast <= 0.1};
}

DesignReport design_report(const Material& mat, const BeamGeometry& geom, double theta0) {
  DesignReport r{};
  r.divergence = geom.divergence();
  r.theta_critical = theta_critical(mat, geom);
  r.theta_optimum = theta_optimum(mat, geom);
  r.tau = tau(mat, geom);
  r.tau_coherent = tau_coherent(mat, geom);
  r.resolution = penumbral_resolution(geom);
  const auto nf = fresnel_number(geom);
  r.fresnel_number = nf.number;
  r.fresnel_regime = nf.regime;
  r.g_max_unblurred = snr_gain_unblurred(mat, geom);
  r.theta0 = theta0;
  r.b_max = brilliance_boost_max(mat, geom, theta0).value;
  r.b_max_at_optimum = brilliance_boost_at_optimum(mat, geom, theta0).value;
  r.theta0_limit = brilliance_theta0_limit(mat, geom);

  if (tau_is_usable(r.tau)) {
    r.sharpening_length = std::sqrt(r.tau);
  } else {
    r.flags.emplace_back("tau_nonpositive: divergence violates the collimation condition");
  }
  const double g = gain_expression(mat, geom);
  if (g > 0.0) {
    r.g_max = g;
  } else {
    r.flags.emplace_back("gain_nonpositive: blur removes all retrieval SNR gain");
  }
  if (r.divergence > r.theta_optimum && r.divergence < r.theta_critical) {
    r.flags.emplace_back("divergence_above_optimum");
  }
  if (nf.regime == FresnelRegime::marginal) {
    r.flags.emplace_back("fresnel_marginal: 1 < N_F < 10, near-field model degraded");
  } else if (nf.regime == FresnelRegime::invalid) {
    r.flags.emplace_back("fresnel_invalid: N_F <= 1, near-field model not applicable");
  }
  if (r.b_max <= 1.0) r.flags.emplace_back("no_brilliance_boost at this divergence");
  if (theta0 > r.theta0_limit) r.flags.emplace_back("no_brilliance_boost at optimum collimation");
  return r;
}

}  // namespace phasebeam::physics
