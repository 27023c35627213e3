#pragma once

// Single-image phase retrieval for single-material samples: normalise by the
// flat field, Lorentzian low-pass 1 / (1 + tau k^2), then -ln(.) / sigma.

#include <optional>

#include "phasebeam/core.hpp"
#include "phasebeam/operators.hpp"

namespace phasebeam::retrieve {

struct RetrievalConfig {
  double tau = 0.0;    // m^2, must be > 0
  double sigma = 0.0;  // m^2, must be > 0
  double i0 = 1.0;
  Padding padding = Padding::mirror2x;
  bool skip_log_step = false;
  /// When set, filtered values below this floor are clamped to it (and
  /// counted) instead of aborting the retrieval.
  std::optional<double> clamp_epsilon;
  /// Optional flat-field raster used instead of the scalar i0.
  std::optional<Raster2D> flat_field;

  /// Throws InvariantError on tau <= 0, sigma <= 0, i0 <= 0 or a bad clamp.
  void validate() const;
};

/// tau from the material and geometry (monochromatic, with source blur);
/// throws PhysicsError when that tau is not positive.
RetrievalConfig make_config(const Material& mat, const BeamGeometry& geom, double i0,
                            Padding padding = Padding::mirror2x);

/// F^-1{ F[img] / (1 + tau (kx^2 + ky^2)) }. Throws InvariantError if tau <= 0.
Raster2D lorentzian_filter(const Raster2D& img, double tau, Padding padding);

struct Retrieval {
  Raster2D image;               // projected density, or filtered image if skip_log_step
  std::size_t clamped_pixels;   // non-zero only with clamp_epsilon
  double fringe_residual;       // see fringe_residual()
};

/// Full procedure with diagnostics. Throws RetrievalError listing offending
/// pixels when the filtered image is not strictly positive and no clamp is set.
Retrieval retrieve_density_detailed(const Raster2D& img, const RetrievalConfig& cfg);

/// rho_perp = -(1 / sigma) ln(lorentzian_filter(img / I0, tau)).
Raster2D retrieve_density(const Raster2D& img, const RetrievalConfig& cfg);

struct SpectralAverages {
  double sigma_av;      // sum w sigma / sum w
  double sigma_tau_av;  // sum w sigma tau / sum w
  /// sigma_tau_av / sigma_av, evaluated as the sigma-weighted mean of tau so a
  /// single bin reproduces its tau exactly.
  double tau_eff;
};

/// Spectrally averaged sigma and sigma*tau; throws PhysicsError if any
/// weighted bin has tau <= 0 or lies outside the dispersion table.
SpectralAverages spectral_averages(const Spectrum& spectrum, const Material& mat,
                                   const BeamGeometry& geom);

/// Poly-energetic retrieval: the monochromatic formula with sigma -> sigma_av
/// and tau -> (sigma tau)_av / sigma_av. img_av is already normalised.
Raster2D retrieve_density_poly(const Raster2D& img_av, const SpectralAverages& averages,
                               Padding padding,
                               std::optional<double> clamp_epsilon = std::nullopt);

/// Fraction of non-DC spectral energy above half the Nyquist radius. Residual
/// phase-contrast fringes raise it; used to tune a manual tau.
double fringe_residual(const Raster2D& img);

}  // namespace phasebeam::retrieve
