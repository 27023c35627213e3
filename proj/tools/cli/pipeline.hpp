#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "phasebeam/core.hpp"
#include "phasebeam/forward.hpp"
#include "phasebeam/io.hpp"
#include "phasebeam/metrics.hpp"
#include "phasebeam/phantom.hpp"
#include "phasebeam/retrieve.hpp"
#include "phasebeam/tomo.hpp"

namespace phasebeam::cli {

/// Retrieval settings for a run: tau from the physics unless overridden.
retrieve::RetrievalConfig retrieval_config(const io::RunConfig& cfg);
forward::ForwardConfig forward_config(const io::RunConfig& cfg);

/// Phase-contrast intensities (counts) for every angle of a projected-density
/// sinogram, with Poisson noise when the config asks for it. Projection a uses
/// the noise stream derive_seed(seed, a).
std::vector<Raster2D> simulate_projections(const io::RunConfig& cfg,
                                           const tomo::Sinogram& projected, unsigned threads);

struct PipelineResult {
  Volume3D phantom;
  tomo::Sinogram projected;
  std::vector<Raster2D> projections;
  tomo::Sinogram sinogram_pre;
  std::optional<tomo::Sinogram> sinogram_post;
  Volume3D volume_attenuation;
  std::optional<Volume3D> volume_phase;
  retrieve::RetrievalConfig retrieval;
  std::size_t slice_index;
  phantom::RoiPair slice_rois;
  phantom::RoiPair projection_rois;
  std::optional<metrics::SnrReport> slice_report;
  std::optional<metrics::SnrReport> projection_report;
};

/// phantom -> projections -> forward + noise -> line integrals -> FBP, for
/// attenuation_only always and phase_retrieved when the mode asks for it.
PipelineResult run_pipeline(const io::RunConfig& cfg, unsigned threads);

}  // namespace phasebeam::cli
