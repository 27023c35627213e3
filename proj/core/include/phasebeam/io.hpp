#pragma once

// File formats. Arrays are raw little-endian f32 payloads (.r32) next to a
// JSON sidecar (.json); a path given with either extension, or with none,
// names the pair. Config and reports are JSON written with sorted keys and
// 17 significant digits so identical inputs give identical bytes.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "phasebeam/core.hpp"
#include "phasebeam/metrics.hpp"
#include "phasebeam/operators.hpp"
#include "phasebeam/physics.hpp"
#include "phasebeam/tomo.hpp"

namespace phasebeam::io {

using Json = nlohmann::json;
namespace fs = std::filesystem;

inline constexpr int kSchemaVersion = 1;

struct FilePair {
  fs::path header;   // .json
  fs::path payload;  // .r32
};

FilePair file_pair(const fs::path& path);

void write_raster(const Raster2D& raster, const fs::path& path);
/// Throws SchemaError (bad header), IoError (missing file, length mismatch)
/// or InvariantError (NaN payload, negative intensity).
Raster2D read_raster(const fs::path& path);

void write_volume(const Volume3D& volume, const fs::path& path);
Volume3D read_volume(const fs::path& path);

void write_sinogram(const tomo::Sinogram& sino, const fs::path& path);
tomo::Sinogram read_sinogram(const fs::path& path);

/// One "wavelength_m,weight" pair per line. Blank lines and lines starting
/// with '#' are skipped, as is a leading header line of non-numeric text.
Spectrum parse_spectrum_csv(std::string_view text, std::string_view source = "<memory>");
Spectrum read_spectrum_csv(const fs::path& path);
void write_spectrum_csv(const Spectrum& spectrum, const fs::path& path);

/// Deterministic serialisation: two-space indent, sorted keys, doubles as
/// %.17g, trailing newline.
std::string dump_json(const Json& value);
void write_json(const Json& value, const fs::path& path);
Json read_json(const fs::path& path);
void write_text(const std::string& text, const fs::path& path);

Json to_json(const Material& mat);
Json to_json(const BeamGeometry& geom);
Json to_json(const Spectrum& spectrum);
Json to_json(const physics::DesignReport& report);
Json to_json(const metrics::SnrReport& report);
Json to_json(const Roi& roi);

struct PgmScaling {
  double min;
  double max;
};

/// 16-bit binary PGM, linearly mapping [min, max] onto [0, 65535].
PgmScaling write_pgm(const Raster2D& raster, const fs::path& path);

struct PhantomSettings {
  std::string kind = "two_cylinder";
  std::size_t n = 128;
  double pitch = 55e-6;     // m
  double density = 5e28;    // nuclei / m^3
};

struct ForwardSettings {
  double i0 = 1.2;  // expected counts per pixel in the open beam
  LaplacianMode laplacian = LaplacianMode::fourier_symbol;
  Padding padding = Padding::mirror2x;
  bool poisson = true;
};

struct RetrievalSettings {
  std::optional<double> tau;  // manual override, m^2
  Padding padding = Padding::mirror2x;
  std::optional<double> clamp_epsilon;
  bool skip_log_step = false;
};

struct TomoSettings {
  std::size_t n_angles = 201;
  tomo::AngularSpan span = tomo::AngularSpan::full_0_360;
  tomo::FbpFilter filter = tomo::FbpFilter::ram_lak;
  tomo::DensityScale scale = tomo::DensityScale::rho;
  tomo::PipelineMode mode = tomo::PipelineMode::phase_retrieved;
};

struct MetricsSettings {
  std::optional<double> theta0;  // defaults to the geometry's divergence
  metrics::SnrEstimator estimator = metrics::SnrEstimator::difference_of_means;
  std::optional<Roi> signal_roi;
  std::optional<Roi> background_roi;
};

struct RunConfig {
  Material material;
  BeamGeometry geometry;
  std::optional<Spectrum> spectrum;
  ForwardSettings forward;
  RetrievalSettings retrieval;
  PhantomSettings phantom;
  TomoSettings tomography;
  MetricsSettings metrics;
  std::uint64_t seed = 0;
};

/// Strict parse: unknown keys, wrong types and missing required fields throw
/// SchemaError naming the offending field. Relative spectrum CSV paths are
/// resolved against base_dir.
RunConfig parse_config(const Json& doc, const fs::path& base_dir = {});
RunConfig read_config(const fs::path& path);
Json to_json(const RunConfig& cfg);

}  // namespace phasebeam::io
