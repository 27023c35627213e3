#include "pipeline.hpp"

#include <sstream>

#include "phasebeam/parallel.hpp"
#include "phasebeam/physics.hpp"

namespace phasebeam::cli {

retrieve::RetrievalConfig retrieval_config(const io::RunConfig& cfg) {
  retrieve::RetrievalConfig r;
  if (cfg.retrieval.tau) {
    r.tau = *cfg.retrieval.tau;
    r.sigma = cfg.material.at_wavelength(cfg.geometry.wavelength()).sigma();
    r.i0 = cfg.forward.i0;
    r.padding = cfg.retrieval.padding;
  } else {
    r = retrieve::make_config(cfg.material, cfg.geometry, cfg.forward.i0, cfg.retrieval.padding);
  }
  r.clamp_epsilon = cfg.retrieval.clamp_epsilon;
  r.skip_log_step = cfg.retrieval.skip_log_step;
  return r;
}

forward::ForwardConfig forward_config(const io::RunConfig& cfg) {
  return forward::ForwardConfig{cfg.material, cfg.geometry, cfg.forward.i0, cfg.forward.laplacian,
                                cfg.forward.padding};
}

std::vector<Raster2D> simulate_projections(const io::RunConfig& cfg,
                                           const tomo::Sinogram& projected, unsigned threads) {
  const auto fcfg = forward_config(cfg);
  std::vector<std::optional<Raster2D>> out(projected.n_angles());
  parallel_for(projected.n_angles(), threads, [&](std::size_t a) {
    const auto rho = projected.projection(a, RasterKind::projected_density);
    auto img = forward::phase_contrast_forward(rho, fcfg);
    if (cfg.forward.poisson) img = forward::add_poisson_noise(img, 1.0, forward::derive_seed(cfg.seed, a));
    out[a] = std::move(img);
  });
  std::vector<Raster2D> result;
  result.reserve(out.size());
  for (auto& r : out) result.push_back(std::move(*r));
  return result;
}

PipelineResult run_pipeline(const io::RunConfig& cfg, unsigned threads) {
  const auto& ph = cfg.phantom;
  auto volume = phantom::two_cylinder(ph.n, ph.pitch, ph.density);
  const auto angles = tomo::uniform_angles(cfg.tomography.n_angles, cfg.tomography.span);
  auto projected = tomo::make_sinogram(volume, angles, threads);
  auto projections = simulate_projections(cfg, projected, threads);
  const auto rcfg = retrieval_config(cfg);

  tomo::PipelineOptions opts;
  opts.filter = cfg.tomography.filter;
  opts.span = cfg.tomography.span;
  opts.scale = cfg.tomography.scale;
  opts.threads = threads;

  opts.mode = tomo::PipelineMode::attenuation_only;
  auto pre = tomo::line_integrals(projections, angles, rcfg, opts);
  auto vol_pre = tomo::fbp_volume(pre, opts.filter, opts.span, threads);

  const std::size_t slice = ph.n / 2;
  const auto default_slice_rois = phantom::two_cylinder_slice_rois(ph.n);
  const phantom::RoiPair slice_rois{cfg.metrics.signal_roi.value_or(default_slice_rois.signal),
                                    cfg.metrics.background_roi.value_or(default_slice_rois.background)};
  const auto projection_rois = phantom::two_cylinder_projection_rois(ph.n);

  PipelineResult result{std::move(volume), std::move(projected), std::move(projections),
                        std::move(pre), std::nullopt, std::move(vol_pre), std::nullopt, rcfg,
                        slice, slice_rois, projection_rois, std::nullopt, std::nullopt};

  if (cfg.tomography.mode == tomo::PipelineMode::phase_retrieved) {
    opts.mode = tomo::PipelineMode::phase_retrieved;
    auto post = tomo::line_integrals(result.projections, angles, rcfg, opts);
    result.volume_phase = tomo::fbp_volume(post, opts.filter, opts.span, threads);
    result.sinogram_post = std::move(post);

    const double theta = cfg.geometry.divergence();
    const double theta0 = cfg.metrics.theta0.value_or(theta);
    result.slice_report = metrics::snr_boost_report(
        result.volume_attenuation.slice_xz(slice), result.volume_phase->slice_xz(slice),
        slice_rois.signal, slice_rois.background, theta, theta0, cfg.metrics.estimator);
    result.projection_report = metrics::snr_boost_report(
        result.sinogram_pre.projection(0), result.sinogram_post->projection(0),
        projection_rois.signal, projection_rois.background, theta, theta0, cfg.metrics.estimator);
  }
  return result;
}

}  // namespace phasebeam::cli
