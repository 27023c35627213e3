#include "app.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include <CLI11.hpp>

#include "manifest.hpp"
#include "phasebeam/errors.hpp"
#include "phasebeam/io.hpp"
#include "phasebeam/metrics.hpp"
#include "phasebeam/parallel.hpp"
#include "phasebeam/physics.hpp"
#include "phasebeam/version.hpp"
#include "pipeline.hpp"

namespace phasebeam::cli {

namespace fs = std::filesystem;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  std::string out = "phasebeam-run";
  std::optional<double> tau;
  std::optional<std::string> mode;
  std::optional<double> clamp_epsilon;
  std::optional<std::string> laplacian;
  std::optional<std::string> padding;
};

void add_common(CLI::App& sub, Common& c, bool needs_config) {
  auto* cfg = sub.add_option("--config", c.config, "Run configuration (JSON)");
  if (needs_config) cfg->required();
  cfg->check(CLI::ExistingFile);
  sub.add_option("--seed", c.seed, "RNG seed (overrides the config)");
  sub.add_option("--threads", c.threads,
                 "Worker threads; 0 uses PHASEBEAM_THREADS or the hardware count");
  sub.add_option("--out", c.out, "Output directory")->capture_default_str();
  sub.add_option("--tau", c.tau, "Manual retrieval filter parameter tau, m^2");
  sub.add_option("--mode", c.mode, "attenuation_only | phase_retrieved");
  sub.add_option("--clamp-epsilon", c.clamp_epsilon,
                 "Clamp filtered values below this floor instead of failing");
  sub.add_option("--laplacian", c.laplacian, "fourier | fd");
  sub.add_option("--padding", c.padding, "mirror2x | none");
}

/// Config from --config with the command-line overrides applied.
io::RunConfig load_config(const Common& c) {
  auto cfg = io::read_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  if (c.tau) {
    if (!(*c.tau > 0.0)) throw InvariantError("--tau must be > 0");
    cfg.retrieval.tau = *c.tau;
  }
  if (c.mode) cfg.tomography.mode = tomo::pipeline_mode_from_string(*c.mode);
  if (c.clamp_epsilon) {
    if (!(*c.clamp_epsilon > 0.0)) throw InvariantError("--clamp-epsilon must be > 0");
    cfg.retrieval.clamp_epsilon = *c.clamp_epsilon;
  }
  if (c.laplacian) cfg.forward.laplacian = laplacian_mode_from_string(*c.laplacian);
  if (c.padding) {
    const auto p = padding_from_string(*c.padding);
    cfg.forward.padding = p;
    cfg.retrieval.padding = p;
  }
  return cfg;
}

fs::path prepare_out(const Common& c) {
  fs::path out = c.out;
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw IoError("cannot create output directory " + out.string() + ": " + ec.message());
  return out;
}

std::string format(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

Roi parse_roi_flag(const std::vector<std::size_t>& v, const char* flag) {
  if (v.size() != 4) throw InvariantError(std::string(flag) + " needs x0 y0 x1 y1");
  return Roi{v[0], v[1], v[2], v[3]};
}

void print_design(std::ostream& out, const physics::DesignReport& r) {
  out << "divergence         " << format("%.6g rad", r.divergence) << "\n"
      << "theta_critical     " << format("%.6g rad", r.theta_critical) << "\n"
      << "theta_optimum      " << format("%.6g rad", r.theta_optimum) << "\n"
      << "tau                " << format("%.6g m^2", r.tau) << "\n"
      << "sharpening length  " << format("%.6g m", r.sharpening_length) << "\n"
      << "resolution R       " << format("%.6g m", r.resolution) << "\n"
      << "Fresnel number     " << format("%.6g", r.fresnel_number) << " ("
      << physics::to_string(r.fresnel_regime) << ")\n"
      << "G_max              " << format("%.6g", r.g_max) << "\n"
      << "B_max at theta0    " << format("%.6g", r.b_max) << "  (theta0 = "
      << format("%.6g rad", r.theta0) << ")\n"
      << "B_max > 1 while theta0 < " << format("%.6g rad", r.theta0_limit) << "\n";
  for (const auto& f : r.flags) out << "flag: " << f << "\n";
}

int cmd_design(const Common& c, std::optional<double> theta0_flag,
               const std::vector<double>& sweep, const std::vector<std::string>& args,
               std::ostream& out) {
  const auto cfg = load_config(c);
  const double theta0 = theta0_flag.value_or(cfg.metrics.theta0.value_or(cfg.geometry.divergence()));
  const auto report = physics::design_report(cfg.material, cfg.geometry, theta0);
  const auto dir = prepare_out(c);
  Manifest manifest("design", args);
  manifest.add_input(c.config);
  manifest.set("config", io::to_json(cfg));

  print_design(out, report);
  io::write_json(io::to_json(report), dir / "design_report.json");
  manifest.add_output(dir, "design_report.json");

  if (!sweep.empty()) {
    io::Json rows = io::Json::array();
    out << "\n  delta_m        theta_crit_rad  theta_opt_rad   tau_m2          R_m             N_F\n";
    for (double delta : sweep) {
      const auto r = physics::design_report(cfg.material, cfg.geometry.with_distance(delta), theta0);
      out << "  " << format("%-14.6g", delta) << format("%-16.6g", r.theta_critical)
          << format("%-16.6g", r.theta_optimum) << format("%-16.6g", r.tau)
          << format("%-16.6g", r.resolution) << format("%.6g", r.fresnel_number) << "\n";
      auto row = io::to_json(r);
      row["sample_to_detector_m"] = delta;
      rows.push_back(row);
    }
    io::write_json(rows, dir / "design_sweep.json");
    manifest.add_output(dir, "design_sweep.json");
  }
  manifest.write(dir);
  return 0;
}

int cmd_phantom(const Common& c, const std::vector<std::string>& args, std::ostream& out) {
  const auto cfg = load_config(c);
  const auto dir = prepare_out(c);
  const auto vol = phantom::two_cylinder(cfg.phantom.n, cfg.phantom.pitch, cfg.phantom.density);
  io::write_volume(vol, dir / "phantom");
  Manifest manifest("phantom", args);
  manifest.add_input(c.config);
  manifest.set("config", io::to_json(cfg));
  manifest.add_array_output(dir, "phantom");
  manifest.write(dir);
  out << "wrote " << (dir / "phantom.json").string() << "\n";
  return 0;
}

int cmd_project(const Common& c, const std::string& volume_path,
                std::optional<std::size_t> n_angles, const std::vector<std::string>& args,
                std::ostream& out) {
  const auto cfg = load_config(c);
  const unsigned threads = resolve_threads(c.threads);
  const auto dir = prepare_out(c);
  Manifest manifest("project", args);
  manifest.add_input(c.config);
  manifest.set("config", io::to_json(cfg));
  const auto vol = volume_path.empty()
                       ? phantom::two_cylinder(cfg.phantom.n, cfg.phantom.pitch, cfg.phantom.density)
                       : io::read_volume(volume_path);
  if (!volume_path.empty()) manifest.add_input(io::file_pair(volume_path).payload);
  const auto angles = tomo::uniform_angles(n_angles.value_or(cfg.tomography.n_angles),
                                           cfg.tomography.span);
  const auto sino = tomo::make_sinogram(vol, angles, threads);
  io::write_sinogram(sino, dir / "projected");
  manifest.add_array_output(dir, "projected");
  manifest.set("threads", threads);
  manifest.write(dir);
  out << "projected " << angles.size() << " angles\n";
  return 0;
}

int cmd_forward(const Common& c, const std::string& input, const std::vector<std::string>& args,
                std::ostream& out) {
  const auto cfg = load_config(c);
  const auto dir = prepare_out(c);
  const auto rho = io::read_raster(input);
  auto img = forward::phase_contrast_forward(rho.with_kind(RasterKind::projected_density),
                                             forward_config(cfg));
  if (cfg.forward.poisson) img = forward::add_poisson_noise(img, 1.0, cfg.seed);
  io::write_raster(img, dir / "intensity");
  Manifest manifest("forward", args);
  manifest.add_input(c.config);
  manifest.add_input(io::file_pair(input).payload);
  manifest.set("config", io::to_json(cfg));
  manifest.add_array_output(dir, "intensity");
  manifest.write(dir);
  out << "mean intensity " << format("%.6g", img.mean()) << " counts\n";
  return 0;
}

int cmd_retrieve(const Common& c, const std::string& input, const std::vector<std::string>& args,
                 std::ostream& out) {
  const auto cfg = load_config(c);
  const auto dir = prepare_out(c);
  const auto img = io::read_raster(input);
  const auto rcfg = retrieval_config(cfg);
  const auto r = retrieve::retrieve_density_detailed(img, rcfg);
  io::write_raster(r.image, dir / "rho_perp");
  io::Json info{{"tau_m2", rcfg.tau},
                {"sigma_m2", rcfg.sigma},
                {"i0", rcfg.i0},
                {"padding", std::string(to_string(rcfg.padding))},
                {"clamped_pixels", r.clamped_pixels},
                {"fringe_residual", r.fringe_residual},
                {"skip_log_step", rcfg.skip_log_step}};
  io::write_json(info, dir / "retrieval.json");
  Manifest manifest("retrieve", args);
  manifest.add_input(c.config);
  manifest.add_input(io::file_pair(input).payload);
  manifest.set("config", io::to_json(cfg));
  manifest.add_array_output(dir, "rho_perp");
  manifest.add_output(dir, "retrieval.json");
  manifest.write(dir);
  out << "tau " << format("%.6g m^2", rcfg.tau) << ", fringe residual "
      << format("%.4g", r.fringe_residual) << ", clamped " << r.clamped_pixels << "\n";
  return 0;
}

int cmd_fbp(const Common& c, const std::string& input, const std::string& filter,
            const std::string& span, const std::vector<std::string>& args, std::ostream& out) {
  const unsigned threads = resolve_threads(c.threads);
  const auto dir = prepare_out(c);
  const auto sino = io::read_sinogram(input);
  const auto vol = tomo::fbp_volume(sino, tomo::fbp_filter_from_string(filter),
                                    tomo::angular_span_from_string(span), threads);
  io::write_volume(vol, dir / "reconstruction");
  io::write_pgm(vol.slice_xz(vol.ny() / 2), dir / "reconstruction_slice.pgm");
  Manifest manifest("fbp", args);
  manifest.add_input(io::file_pair(input).payload);
  manifest.set("threads", threads);
  manifest.add_array_output(dir, "reconstruction");
  manifest.add_output(dir, "reconstruction_slice.pgm");
  manifest.write(dir);
  out << "reconstructed " << vol.ny() << " slices\n";
  return 0;
}

struct MetricsArgs {
  std::string pre;
  std::string post;
  std::string input;
  std::vector<std::size_t> signal;
  std::vector<std::size_t> background;
  std::vector<std::size_t> roi;
  double theta_used = 0.0;
  double theta0 = 0.0;
  std::string estimator = "difference_of_means";
  double clip = 0.0;
};

int cmd_metrics(const Common& c, const MetricsArgs& m, const std::vector<std::string>& args,
                std::ostream& out) {
  const auto dir = prepare_out(c);
  Manifest manifest("metrics", args);
  if (!m.input.empty()) {
    const auto img = io::read_raster(m.input);
    const auto roi = parse_roi_flag(m.roi, "--roi");
    const auto stats = metrics::roi_stats(img, roi);
    io::Json j{{"roi", io::to_json(roi)},
               {"mean", stats.mean},
               {"stddev", stats.stddev},
               {"n", stats.n},
               {"clip_percentile", m.clip},
               {"michelson_visibility", metrics::michelson_visibility(img, roi, m.clip)}};
    io::write_json(j, dir / "roi_metrics.json");
    manifest.add_input(io::file_pair(m.input).payload);
    manifest.add_output(dir, "roi_metrics.json");
    out << "visibility " << format("%.6g", j["michelson_visibility"].get<double>()) << "\n";
  } else {
    if (m.pre.empty() || m.post.empty()) {
      throw InvariantError("metrics needs --input (ROI metrics) or --pre and --post (SNR report)");
    }
    const auto report = metrics::snr_boost_report(
        io::read_raster(m.pre), io::read_raster(m.post), parse_roi_flag(m.signal, "--signal-roi"),
        parse_roi_flag(m.background, "--background-roi"), m.theta_used, m.theta0,
        metrics::snr_estimator_from_string(m.estimator));
    io::write_json(io::to_json(report), dir / "snr_report.json");
    manifest.add_input(io::file_pair(m.pre).payload);
    manifest.add_input(io::file_pair(m.post).payload);
    manifest.add_output(dir, "snr_report.json");
    out << "snr boost " << format("%.4g", report.snr_boost) << ", net "
        << format("%.4g", report.net_boost) << ", brilliance "
        << format("%.4g", report.brilliance_boost) << "\n";
  }
  manifest.write(dir);
  return 0;
}

void write_profiles(const PipelineResult& r, const fs::path& path) {
  const auto truth = r.phantom.slice_xz(r.slice_index);
  const auto att = r.volume_attenuation.slice_xz(r.slice_index);
  const std::optional<Raster2D> phase =
      r.volume_phase ? std::optional<Raster2D>(r.volume_phase->slice_xz(r.slice_index))
                     : std::nullopt;
  const auto& roi = r.slice_rois.signal;
  const std::size_t row = (roi.y0 + roi.y1) / 2;
  std::string csv = phase ? "x_m,truth,attenuation_only,phase_retrieved\n"
                          : "x_m,truth,attenuation_only\n";
  const double c0 = 0.5 * static_cast<double>(truth.width() - 1);
  char buf[160];
  for (std::size_t x = 0; x < truth.width(); ++x) {
    const double xm = (static_cast<double>(x) - c0) * truth.pitch_x();
    if (phase) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", xm, truth(x, row), att(x, row),
                    (*phase)(x, row));
    } else {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", xm, truth(x, row), att(x, row));
    }
    csv += buf;
  }
  io::write_text(csv, path);
}

int cmd_pipeline(const Common& c, const std::vector<std::string>& args, std::ostream& out) {
  const auto cfg = load_config(c);
  const unsigned threads = resolve_threads(c.threads);
  const auto dir = prepare_out(c);
  const auto r = run_pipeline(cfg, threads);

  Manifest manifest("pipeline", args);
  manifest.add_input(c.config);
  manifest.set("config", io::to_json(cfg));
  manifest.set("seed", cfg.seed);
  manifest.set("threads", threads);
  manifest.set("tau_m2", r.retrieval.tau);

  auto array = [&](auto writer, const auto& value, const std::string& name) {
    writer(value, dir / name);
    manifest.add_array_output(dir, name);
  };
  auto file = [&](const std::string& name) { manifest.add_output(dir, name); };

  array(io::write_volume, r.phantom, "phantom");
  {
    std::vector<double> counts;
    counts.reserve(r.projections.size() * r.projections.front().size());
    for (const auto& p : r.projections) counts.insert(counts.end(), p.values().begin(), p.values().end());
    const tomo::Sinogram stack(r.projected.angles(), r.projected.detector_pixels(),
                               r.projected.slices(), r.projected.pitch(), std::move(counts));
    array(io::write_sinogram, stack, "projections_counts");
  }
  array(io::write_sinogram, r.sinogram_pre, "sinogram_attenuation");
  array(io::write_volume, r.volume_attenuation, "volume_attenuation");
  io::write_pgm(r.volume_attenuation.slice_xz(r.slice_index), dir / "slice_attenuation.pgm");
  file("slice_attenuation.pgm");

  if (r.volume_phase) {
    array(io::write_sinogram, *r.sinogram_post, "sinogram_phase_retrieved");
    array(io::write_volume, *r.volume_phase, "volume_phase_retrieved");
    io::write_pgm(r.volume_phase->slice_xz(r.slice_index), dir / "slice_phase_retrieved.pgm");
    file("slice_phase_retrieved.pgm");
    io::write_json(io::to_json(*r.slice_report), dir / "snr_report.json");
    file("snr_report.json");
    io::write_json(io::to_json(*r.projection_report), dir / "snr_report_projection.json");
    file("snr_report_projection.json");
  }
  write_profiles(r, dir / "line_profiles.csv");
  file("line_profiles.csv");
  manifest.write(dir);

  out << "pipeline: " << r.projected.n_angles() << " projections, tau "
      << format("%.6g m^2", r.retrieval.tau) << ", mode "
      << tomo::to_string(cfg.tomography.mode) << "\n";
  if (r.slice_report) {
    const auto& s = *r.slice_report;
    out << "tomographic SNR " << format("%.4g", s.snr_pre) << " -> " << format("%.4g", s.snr_post)
        << ", boost " << format("%.4g", s.snr_boost) << ", f " << format("%.4g", s.collimation_penalty_f)
        << ", net " << format("%.4g", s.net_boost) << ", brilliance "
        << format("%.4g", s.brilliance_boost) << "\n";
    out << "projection SNR boost " << format("%.4g", r.projection_report->snr_boost) << "\n";
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Neutron propagation-based phase-contrast simulation, retrieval and tomography",
               "phasebeam"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  Common common;
  auto* design = app.add_subcommand("design", "Collimation and SNR design calculator");
  add_common(*design, common, true);
  std::optional<double> theta0;
  std::vector<double> sweep;
  design->add_option("--theta0", theta0, "Reference divergence for the brilliance boost, rad");
  design->add_option("--sweep-delta", sweep, "Sample-detector distances to tabulate, m")
      ->delimiter(',');

  auto* phantom_cmd = app.add_subcommand("phantom", "Write the configured phantom volume");
  add_common(*phantom_cmd, common, true);

  auto* project = app.add_subcommand("project", "Projected-density sinogram of a volume");
  add_common(*project, common, true);
  std::string volume_path;
  std::optional<std::size_t> n_angles;
  project->add_option("--volume", volume_path, "Volume file (default: configured phantom)");
  project->add_option("--angles", n_angles, "Number of projection angles");

  auto* forward_cmd = app.add_subcommand("forward", "Phase-contrast image of a projected density");
  add_common(*forward_cmd, common, true);
  std::string forward_input;
  forward_cmd->add_option("--input", forward_input, "Projected-density raster")->required();

  auto* retrieve_cmd = app.add_subcommand("retrieve", "Single-image phase retrieval");
  add_common(*retrieve_cmd, common, true);
  std::string retrieve_input;
  retrieve_cmd->add_option("--input", retrieve_input, "Intensity raster")->required();

  auto* fbp_cmd = app.add_subcommand("fbp", "Filtered backprojection of a sinogram");
  add_common(*fbp_cmd, common, false);
  std::string fbp_input;
  std::string filter = "ram_lak";
  std::string span = "full_0_360";
  fbp_cmd->add_option("--input", fbp_input, "Sinogram file")->required();
  fbp_cmd->add_option("--filter", filter, "ram_lak | shepp_logan | cosine")->capture_default_str();
  fbp_cmd->add_option("--span", span, "half_0_180 | full_0_360")->capture_default_str();

  auto* metrics_cmd = app.add_subcommand("metrics", "ROI statistics, visibility, SNR boost report");
  add_common(*metrics_cmd, common, false);
  MetricsArgs m;
  metrics_cmd->add_option("--input", m.input, "Raster for ROI statistics and visibility");
  metrics_cmd->add_option("--roi", m.roi, "x0 y0 x1 y1")->expected(4)->delimiter(',');
  metrics_cmd->add_option("--clip-percentile", m.clip, "Visibility percentile clip");
  metrics_cmd->add_option("--pre", m.pre, "Pre-retrieval raster");
  metrics_cmd->add_option("--post", m.post, "Post-retrieval raster");
  metrics_cmd->add_option("--signal-roi", m.signal, "x0 y0 x1 y1")->expected(4)->delimiter(',');
  metrics_cmd->add_option("--background-roi", m.background, "x0 y0 x1 y1")
      ->expected(4)
      ->delimiter(',');
  metrics_cmd->add_option("--theta-used", m.theta_used, "Divergence used, rad");
  metrics_cmd->add_option("--theta0", m.theta0, "Reference divergence, rad");
  metrics_cmd->add_option("--estimator", m.estimator, "difference_of_means | single_roi");

  auto* pipeline = app.add_subcommand("pipeline", "End-to-end simulation, retrieval and FBP");
  add_common(*pipeline, common, true);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (design->parsed()) return cmd_design(common, theta0, sweep, args, out);
    if (phantom_cmd->parsed()) return cmd_phantom(common, args, out);
    if (project->parsed()) return cmd_project(common, volume_path, n_angles, args, out);
    if (forward_cmd->parsed()) return cmd_forward(common, forward_input, args, out);
    if (retrieve_cmd->parsed()) return cmd_retrieve(common, retrieve_input, args, out);
    if (fbp_cmd->parsed()) return cmd_fbp(common, fbp_input, filter, span, args, out);
    if (metrics_cmd->parsed()) return cmd_metrics(common, m, args, out);
    if (pipeline->parsed()) return cmd_pipeline(common, args, out);
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace phasebeam::cli
