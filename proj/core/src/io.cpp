#include "phasebeam/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

namespace phasebeam::io {

namespace {

[[noreturn]] void schema_fail(const std::string& where, const std::string& what) {
  throw SchemaError(where + ": " + what);
}

// ---------------------------------------------------------------------------
// Strict object reader.

class Fields {
 public:
  Fields(const Json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) schema_fail(path_.empty() ? "<root>" : path_, "expected an object");
  }

  bool has(const std::string& key) const { return obj_.contains(key); }

  const Json& at(const std::string& key) {
    used_.insert(key);
    if (!obj_.contains(key)) schema_fail(name(key), "required field is missing");
    return obj_.at(key);
  }

  double number(const std::string& key) {
    const auto& v = at(key);
    if (!v.is_number()) schema_fail(name(key), "expected a number");
    return v.get<double>();
  }

  std::optional<double> optional_number(const std::string& key) {
    if (!has(key) || obj_.at(key).is_null()) {
      used_.insert(key);
      return std::nullopt;
    }
    return number(key);
  }

  std::uint64_t unsigned_integer(const std::string& key) {
    const auto& v = at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      schema_fail(name(key), "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  std::string string(const std::string& key) {
    const auto& v = at(key);
    if (!v.is_string()) schema_fail(name(key), "expected a string");
    return v.get<std::string>();
  }

  bool boolean(const std::string& key) {
    const auto& v = at(key);
    if (!v.is_boolean()) schema_fail(name(key), "expected true or false");
    return v.get<bool>();
  }

  Fields object(const std::string& key) { return Fields(at(key), name(key)); }

  /// Converts a string field with a from_string function, turning unknown
  /// names into schema errors.
  template <typename F>
  auto choice(const std::string& key, F&& from_string) {
    const auto s = string(key);
    try {
      return from_string(s);
    } catch (const InvariantError& e) {
      schema_fail(name(key), e.what());
    }
  }

  std::string name(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  void finish() const {
    for (const auto& item : obj_.items()) {
      if (!used_.count(item.key())) schema_fail(name(item.key()), "unknown field");
    }
  }

 private:
  const Json& obj_;
  std::string path_;
  std::set<std::string> used_;
};

void check_schema_version(Fields& f) {
  const auto v = f.unsigned_integer("schema_version");
  if (v != static_cast<std::uint64_t>(kSchemaVersion)) {
    schema_fail(f.name("schema_version"),
                "unsupported version " + std::to_string(v) + " (expected " +
                    std::to_string(kSchemaVersion) + ")");
  }
}

void check_array_encoding(Fields& f) {
  if (f.string("endianness") != "little") schema_fail(f.name("endianness"), "must be \"little\"");
  if (f.string("dtype") != "f32") schema_fail(f.name("dtype"), "must be \"f32\"");
}

// ---------------------------------------------------------------------------
// f32 payloads.

std::uint32_t byteswap32(std::uint32_t v) {
  return (v >> 24) | ((v >> 8) & 0xff00u) | ((v << 8) & 0xff0000u) | (v << 24);
}

void write_payload(std::span<const double> values, const fs::path& path) {
  std::vector<std::uint32_t> words(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto w = std::bit_cast<std::uint32_t>(static_cast<float>(values[i]));
    if constexpr (std::endian::native == std::endian::big) w = byteswap32(w);
    words[i] = w;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(words.data()),
            static_cast<std::streamsize>(words.size() * sizeof(std::uint32_t)));
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<double> read_payload(const fs::path& path, std::size_t expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  in.seekg(0, std::ios::end);
  const auto bytes = static_cast<std::size_t>(in.tellg());
  in.seekg(0);
  if (bytes != expected * sizeof(float)) {
    std::ostringstream os;
    os << path.string() << " holds " << bytes << " bytes, header requires "
       << expected * sizeof(float);
    throw IoError(os.str(), ErrorCode::io_length_mismatch);
  }
  std::vector<std::uint32_t> words(expected);
  in.read(reinterpret_cast<char*>(words.data()), static_cast<std::streamsize>(bytes));
  if (!in) throw IoError("failed reading " + path.string());
  std::vector<double> values(expected);
  for (std::size_t i = 0; i < expected; ++i) {
    auto w = words[i];
    if constexpr (std::endian::native == std::endian::big) w = byteswap32(w);
    const float f = std::bit_cast<float>(w);
    if (!std::isfinite(f)) {
      throw InvariantError(path.string() + ": payload value at index " + std::to_string(i) +
                           " is not finite");
    }
    values[i] = f;
  }
  return values;
}

std::size_t checked_size(Fields& f, const std::string& key) {
  const auto v = f.unsigned_integer(key);
  if (v < 1) schema_fail(f.name(key), "must be >= 1");
  return static_cast<std::size_t>(v);
}

// ---------------------------------------------------------------------------
// Deterministic JSON text.

void append_number(std::string& out, double v) {
  if (!std::isfinite(v)) throw InvariantError("cannot serialise a non-finite number to JSON");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

void dump_value(const Json& v, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  const std::string close(static_cast<std::size_t>(indent), ' ');
  switch (v.type()) {
    case Json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, child] : v.items()) {  // std::map: sorted keys
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(key).dump() + ": ";
        dump_value(child, out, indent + 2);
      }
      out += "\n" + close + "}";
      return;
    }
    case Json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        dump_value(v[i], out, indent + 2);
      }
      out += "\n" + close + "]";
      return;
    }
    case Json::value_t::number_float: append_number(out, v.get<double>()); return;
    default: out += v.dump(); return;
  }
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::optional<double> parse_double(const std::string& s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

Json roi_array(const Roi& roi) { return Json::array({roi.x0, roi.y0, roi.x1, roi.y1}); }

Roi parse_roi(const Json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 4) schema_fail(where, "expected [x0, y0, x1, y1]");
  std::size_t c[4];
  for (std::size_t i = 0; i < 4; ++i) {
    if (!v[i].is_number_unsigned() && !(v[i].is_number_integer() && v[i].get<std::int64_t>() >= 0)) {
      schema_fail(where, "ROI corners must be non-negative integers");
    }
    c[i] = v[i].get<std::size_t>();
  }
  if (c[2] < c[0] || c[3] < c[1]) schema_fail(where, "ROI corners are inverted");
  return Roi{c[0], c[1], c[2], c[3]};
}

Json stats_json(const metrics::RoiStats& s) {
  return Json{{"mean", s.mean}, {"stddev", s.stddev}, {"n", s.n}};
}

}  // namespace

FilePair file_pair(const fs::path& path) {
  fs::path base = path;
  const auto ext = path.extension();
  if (ext == ".json" || ext == ".r32") base.replace_extension();
  fs::path header = base;
  fs::path payload = base;
  header += ".json";
  payload += ".r32";
  return {header, payload};
}

// ---------------------------------------------------------------------------
// Rasters, volumes, sinograms.

void write_raster(const Raster2D& raster, const fs::path& path) {
  const auto files = file_pair(path);
  Json h{{"schema_version", kSchemaVersion},
         {"width", raster.width()},
         {"height", raster.height()},
         {"pitch_x_m", raster.pitch_x()},
         {"pitch_y_m", raster.pitch_y()},
         {"kind", std::string(to_string(raster.kind()))},
         {"endianness", "little"},
         {"dtype", "f32"}};
  write_json(h, files.header);
  write_payload(raster.values(), files.payload);
}

Raster2D read_raster(const fs::path& path) {
  const auto files = file_pair(path);
  const Json doc = read_json(files.header);
  Fields f(doc, files.header.filename().string());
  check_schema_version(f);
  const auto w = checked_size(f, "width");
  const auto h = checked_size(f, "height");
  const double px = f.number("pitch_x_m");
  const double py = f.number("pitch_y_m");
  const auto kind = f.choice("kind", raster_kind_from_string);
  check_array_encoding(f);
  f.finish();
  return Raster2D(w, h, px, py, read_payload(files.payload, w * h), kind);
}

void write_volume(const Volume3D& volume, const fs::path& path) {
  const auto files = file_pair(path);
  Json h{{"schema_version", kSchemaVersion},
         {"nx", volume.nx()},
         {"ny", volume.ny()},
         {"nz", volume.nz()},
         {"pitch_m", volume.voxel_pitch()},
         {"kind", std::string(to_string(volume.kind()))},
         {"endianness", "little"},
         {"dtype", "f32"}};
  write_json(h, files.header);
  write_payload(volume.density(), files.payload);
}

Volume3D read_volume(const fs::path& path) {
  const auto files = file_pair(path);
  const Json doc = read_json(files.header);
  Fields f(doc, files.header.filename().string());
  check_schema_version(f);
  const auto nx = checked_size(f, "nx");
  const auto ny = checked_size(f, "ny");
  const auto nz = checked_size(f, "nz");
  const double pitch = f.number("pitch_m");
  const auto kind = f.choice("kind", volume_kind_from_string);
  check_array_encoding(f);
  f.finish();
  return Volume3D(nx, ny, nz, pitch, read_payload(files.payload, nx * ny * nz), kind);
}

void write_sinogram(const tomo::Sinogram& sino, const fs::path& path) {
  const auto files = file_pair(path);
  Json h{{"schema_version", kSchemaVersion},
         {"n_angles", sino.n_angles()},
         {"detector_pixels", sino.detector_pixels()},
         {"slices", sino.slices()},
         {"pitch_m", sino.pitch()},
         {"angles_rad", sino.angles()},
         {"endianness", "little"},
         {"dtype", "f32"}};
  write_json(h, files.header);
  write_payload(sino.values(), files.payload);
}

tomo::Sinogram read_sinogram(const fs::path& path) {
  const auto files = file_pair(path);
  const Json doc = read_json(files.header);
  Fields f(doc, files.header.filename().string());
  check_schema_version(f);
  const auto n = checked_size(f, "n_angles");
  const auto det = checked_size(f, "detector_pixels");
  const auto slices = checked_size(f, "slices");
  const double pitch = f.number("pitch_m");
  const auto& a = f.at("angles_rad");
  if (!a.is_array() || a.size() != n) {
    schema_fail(f.name("angles_rad"), "expected an array of n_angles numbers");
  }
  std::vector<double> angles;
  angles.reserve(n);
  for (const auto& x : a) {
    if (!x.is_number()) schema_fail(f.name("angles_rad"), "expected numbers");
    angles.push_back(x.get<double>());
  }
  check_array_encoding(f);
  f.finish();
  return tomo::Sinogram(std::move(angles), det, slices, pitch,
                        read_payload(files.payload, n * det * slices));
}

// ---------------------------------------------------------------------------
// Spectra.

Spectrum parse_spectrum_csv(std::string_view text, std::string_view source) {
  std::vector<SpectrumBin> bins;
  std::size_t line_no = 0;
  bool header_allowed = true;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;

    const std::string where = std::string(source) + ":" + std::to_string(line_no);
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      schema_fail(where, "expected two comma-separated fields 'wavelength_m,weight'");
    }
    const auto wl = parse_double(trim(std::string_view(line).substr(0, comma)));
    const auto wt = parse_double(trim(std::string_view(line).substr(comma + 1)));
    if (!wl || !wt) {
      if (header_allowed && bins.empty()) {
        header_allowed = false;
        continue;
      }
      schema_fail(where, "fields are not numbers");
    }
    header_allowed = false;
    if (!(*wl > 0.0) || !std::isfinite(*wl)) schema_fail(where, "wavelength_m must be > 0");
    if (!(*wt >= 0.0) || !std::isfinite(*wt)) schema_fail(where, "weight must be >= 0");
    if (!bins.empty() && !(*wl > bins.back().wavelength)) {
      schema_fail(where, "wavelengths must be strictly increasing");
    }
    bins.push_back({*wl, *wt});
  }
  if (bins.empty()) schema_fail(std::string(source), "spectrum has no bins");
  try {
    return Spectrum(std::move(bins));
  } catch (const InvariantError& e) {
    schema_fail(std::string(source), e.what());
  }
}

Spectrum read_spectrum_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_spectrum_csv(ss.str(), path.string());
}

void write_spectrum_csv(const Spectrum& spectrum, const fs::path& path) {
  std::string out = "wavelength_m,weight\n";
  for (const auto& b : spectrum.bins()) {
    append_number(out, b.wavelength);
    out += ',';
    append_number(out, b.weight);
    out += '\n';
  }
  write_text(out, path);
}

// ---------------------------------------------------------------------------
// JSON.

std::string dump_json(const Json& value) {
  std::string out;
  dump_value(value, out, 0);
  out += '\n';
  return out;
}

void write_json(const Json& value, const fs::path& path) { write_text(dump_json(value), path); }

void write_text(const std::string& text, const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

Json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw SchemaError(path.string() + ": malformed JSON: " + e.what());
  }
}

Json to_json(const Material& mat) {
  Json j{{"b_m", mat.b()}, {"sigma_m2", mat.sigma()}};
  if (mat.has_dispersion()) {
    Json table = Json::array();
    for (const auto& e : mat.dispersion()) {
      table.push_back({{"wavelength_m", e.wavelength}, {"b_m", e.b}, {"sigma_m2", e.sigma}});
    }
    j["dispersion"] = table;
  }
  return j;
}

Json to_json(const BeamGeometry& geom) {
  return Json{{"pinhole_d_m", geom.pinhole_d()},
              {"source_to_sample_m", geom.source_to_sample()},
              {"sample_to_detector_m", geom.sample_to_detector()},
              {"wavelength_m", geom.wavelength()},
              {"magnification", geom.magnification()}};
}

Json to_json(const Spectrum& spectrum) {
  Json bins = Json::array();
  for (const auto& b : spectrum.bins()) bins.push_back({{"wavelength_m", b.wavelength}, {"weight", b.weight}});
  return Json{{"bins", bins}};
}

Json to_json(const physics::DesignReport& r) {
  return Json{{"divergence_rad", r.divergence},
              {"theta_critical_rad", r.theta_critical},
              {"theta_optimum_rad", r.theta_optimum},
              {"tau_m2", r.tau},
              {"tau_coherent_m2", r.tau_coherent},
              {"sharpening_length_m", r.sharpening_length},
              {"resolution_m", r.resolution},
              {"fresnel_number", r.fresnel_number},
              {"fresnel_regime", physics::to_string(r.fresnel_regime)},
              {"g_max", r.g_max},
              {"g_max_unblurred", r.g_max_unblurred},
              {"theta0_rad", r.theta0},
              {"b_max", r.b_max},
              {"b_max_at_optimum", r.b_max_at_optimum},
              {"theta0_limit_rad", r.theta0_limit},
              {"flags", r.flags}};
}

Json to_json(const Roi& roi) { return roi_array(roi); }

Json to_json(const metrics::SnrReport& r) {
  return Json{{"snr_pre", r.snr_pre},
              {"snr_post", r.snr_post},
              {"snr_boost", r.snr_boost},
              {"collimation_penalty_f", r.collimation_penalty_f},
              {"net_boost", r.net_boost},
              {"brilliance_boost", r.brilliance_boost},
              {"inputs",
               {{"theta_used_rad", r.theta_used},
                {"theta0_rad", r.theta0},
                {"estimator", std::string(metrics::to_string(r.estimator))},
                {"signal_roi", roi_array(r.signal_roi)},
                {"background_roi", roi_array(r.background_roi)}}},
              {"roi_stats",
               {{"pre_signal", stats_json(r.pre_signal)},
                {"pre_background", stats_json(r.pre_background)},
                {"post_signal", stats_json(r.post_signal)},
                {"post_background", stats_json(r.post_background)}}}};
}

PgmScaling write_pgm(const Raster2D& raster, const fs::path& path) {
  const auto v = raster.values();
  const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
  const PgmScaling s{*mn, *mx};
  const double range = s.max - s.min;
  std::string out = "P5\n" + std::to_string(raster.width()) + " " +
                    std::to_string(raster.height()) + "\n65535\n";
  out.reserve(out.size() + 2 * v.size());
  for (double x : v) {
    const double t = range > 0.0 ? (x - s.min) / range : 0.0;
    const auto q = static_cast<std::uint16_t>(std::lround(t * 65535.0));
    out += static_cast<char>(q >> 8);
    out += static_cast<char>(q & 0xff);
  }
  write_text(out, path);
  return s;
}

// ---------------------------------------------------------------------------
// Run configuration.

RunConfig parse_config(const Json& doc, const fs::path& base_dir) {
  Fields root(doc, "");
  check_schema_version(root);

  auto mf = root.object("material");
  const double b = mf.number("b_m");
  const double sigma = mf.number("sigma_m2");
  std::vector<DispersionEntry> table;
  if (mf.has("dispersion")) {
    const auto& arr = mf.at("dispersion");
    if (!arr.is_array()) schema_fail(mf.name("dispersion"), "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Fields e(arr[i], mf.name("dispersion") + "[" + std::to_string(i) + "]");
      table.push_back({e.number("wavelength_m"), e.number("b_m"), e.number("sigma_m2")});
      e.finish();
    }
  }
  mf.finish();

  auto gf = root.object("geometry");
  const double d = gf.number("pinhole_d_m");
  const double L = gf.number("source_to_sample_m");
  const double delta = gf.number("sample_to_detector_m");
  const double lambda = gf.number("wavelength_m");
  const double M = gf.optional_number("magnification").value_or(1.0);
  gf.finish();

  std::optional<Spectrum> spectrum;
  if (root.has("spectrum")) {
    auto sf = root.object("spectrum");
    if (sf.has("csv") == sf.has("bins")) {
      schema_fail("spectrum", "give exactly one of 'csv' or 'bins'");
    }
    if (sf.has("csv")) {
      fs::path p = sf.string("csv");
      if (p.is_relative()) p = base_dir / p;
      spectrum = read_spectrum_csv(p);
    } else {
      const auto& arr = sf.at("bins");
      if (!arr.is_array()) schema_fail("spectrum.bins", "expected an array");
      std::vector<SpectrumBin> bins;
      for (std::size_t i = 0; i < arr.size(); ++i) {
        Fields e(arr[i], "spectrum.bins[" + std::to_string(i) + "]");
        bins.push_back({e.number("wavelength_m"), e.number("weight")});
        e.finish();
      }
      spectrum = Spectrum(std::move(bins));
    }
    sf.finish();
  }

  ForwardSettings fwd;
  if (root.has("forward")) {
    auto f = root.object("forward");
    if (f.has("i0")) fwd.i0 = f.number("i0");
    if (f.has("laplacian")) fwd.laplacian = f.choice("laplacian", laplacian_mode_from_string);
    if (f.has("padding")) fwd.padding = f.choice("padding", padding_from_string);
    if (f.has("poisson")) fwd.poisson = f.boolean("poisson");
    f.finish();
    if (!(fwd.i0 > 0.0)) schema_fail("forward.i0", "must be > 0");
  }

  RetrievalSettings ret;
  if (root.has("retrieval")) {
    auto f = root.object("retrieval");
    ret.tau = f.optional_number("tau_m2");
    if (f.has("padding")) ret.padding = f.choice("padding", padding_from_string);
    ret.clamp_epsilon = f.optional_number("clamp_epsilon");
    if (f.has("skip_log_step")) ret.skip_log_step = f.boolean("skip_log_step");
    f.finish();
    if (ret.tau && !(*ret.tau > 0.0)) schema_fail("retrieval.tau_m2", "must be > 0");
    if (ret.clamp_epsilon && !(*ret.clamp_epsilon > 0.0)) {
      schema_fail("retrieval.clamp_epsilon", "must be > 0");
    }
  }

  PhantomSettings ph;
  if (root.has("phantom")) {
    auto f = root.object("phantom");
    if (f.has("kind")) ph.kind = f.string("kind");
    if (f.has("n")) ph.n = checked_size(f, "n");
    if (f.has("pitch_m")) ph.pitch = f.number("pitch_m");
    if (f.has("density")) ph.density = f.number("density");
    f.finish();
    if (ph.kind != "two_cylinder") schema_fail("phantom.kind", "only \"two_cylinder\" is supported");
    if (!(ph.pitch > 0.0)) schema_fail("phantom.pitch_m", "must be > 0");
    if (!(ph.density >= 0.0)) schema_fail("phantom.density", "must be >= 0");
  }

  TomoSettings tomo_settings;
  if (root.has("tomography")) {
    auto f = root.object("tomography");
    if (f.has("n_angles")) tomo_settings.n_angles = checked_size(f, "n_angles");
    if (f.has("span")) tomo_settings.span = f.choice("span", tomo::angular_span_from_string);
    if (f.has("filter")) tomo_settings.filter = f.choice("filter", tomo::fbp_filter_from_string);
    if (f.has("scale")) {
      tomo_settings.scale = f.choice("scale", [](std::string_view s) {
        if (s == "rho") return tomo::DensityScale::rho;
        if (s == "sigma_rho") return tomo::DensityScale::sigma_rho;
        throw InvariantError("expected \"rho\" or \"sigma_rho\"");
      });
    }
    if (f.has("mode")) tomo_settings.mode = f.choice("mode", tomo::pipeline_mode_from_string);
    f.finish();
  }

  MetricsSettings ms;
  if (root.has("metrics")) {
    auto f = root.object("metrics");
    ms.theta0 = f.optional_number("theta0_rad");
    if (f.has("estimator")) ms.estimator = f.choice("estimator", metrics::snr_estimator_from_string);
    if (f.has("signal_roi")) ms.signal_roi = parse_roi(f.at("signal_roi"), "metrics.signal_roi");
    if (f.has("background_roi")) {
      ms.background_roi = parse_roi(f.at("background_roi"), "metrics.background_roi");
    }
    f.finish();
    if (ms.theta0 && !(*ms.theta0 > 0.0)) schema_fail("metrics.theta0_rad", "must be > 0");
  }

  const std::uint64_t seed = root.has("seed") ? root.unsigned_integer("seed") : 0;
  root.finish();

  return RunConfig{Material(b, sigma, std::move(table)),
                   BeamGeometry(d, L, delta, lambda, M),
                   std::move(spectrum),
                   fwd,
                   ret,
                   ph,
                   tomo_settings,
                   ms,
                   seed};
}

RunConfig read_config(const fs::path& path) {
  return parse_config(read_json(path), path.parent_path());
}

Json to_json(const RunConfig& cfg) {
  Json j{{"schema_version", kSchemaVersion},
         {"seed", cfg.seed},
         {"material", to_json(cfg.material)},
         {"geometry", to_json(cfg.geometry)},
         {"forward",
          {{"i0", cfg.forward.i0},
           {"laplacian", std::string(to_string(cfg.forward.laplacian))},
           {"padding", std::string(to_string(cfg.forward.padding))},
           {"poisson", cfg.forward.poisson}}},
         {"phantom",
          {{"kind", cfg.phantom.kind},
           {"n", cfg.phantom.n},
           {"pitch_m", cfg.phantom.pitch},
           {"density", cfg.phantom.density}}},
         {"tomography",
          {{"n_angles", cfg.tomography.n_angles},
           {"span", std::string(to_string(cfg.tomography.span))},
           {"filter", std::string(to_string(cfg.tomography.filter))},
           {"scale", cfg.tomography.scale == tomo::DensityScale::rho ? "rho" : "sigma_rho"},
           {"mode", std::string(to_string(cfg.tomography.mode))}}}};
  if (cfg.spectrum) j["spectrum"] = to_json(*cfg.spectrum);

  Json ret{{"padding", std::string(to_string(cfg.retrieval.padding))},
           {"skip_log_step", cfg.retrieval.skip_log_step}};
  if (cfg.retrieval.tau) ret["tau_m2"] = *cfg.retrieval.tau;
  if (cfg.retrieval.clamp_epsilon) ret["clamp_epsilon"] = *cfg.retrieval.clamp_epsilon;
  j["retrieval"] = ret;

  Json m{{"estimator", std::string(metrics::to_string(cfg.metrics.estimator))}};
  if (cfg.metrics.theta0) m["theta0_rad"] = *cfg.metrics.theta0;
  if (cfg.metrics.signal_roi) m["signal_roi"] = roi_array(*cfg.metrics.signal_roi);
  if (cfg.metrics.background_roi) m["background_roi"] = roi_array(*cfg.metrics.background_roi);
  j["metrics"] = m;
  return j;
}

}  // namespace phasebeam::io
