#include <gtest/gtest.h>

#include <sstream>

#include "app.hpp"
#include "manifest.hpp"
#include "phasebeam/io.hpp"
#include "test_support.hpp"

using namespace phasebeam;
using namespace phasebeam::testing;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path reference_config() { return fs::path(PHASEBEAM_SOURCE_DIR) / "configs" / "reference_design.json"; }

/// Small, fast pipeline configuration.
fs::path small_config(const fs::path& dir) {
  auto doc = io::read_json(fs::path(PHASEBEAM_SOURCE_DIR) / "configs" / "desk.json");
  doc["phantom"]["n"] = 32;
  doc["tomography"]["n_angles"] = 24;
  io::write_json(doc, dir / "small.json");
  return dir / "small.json";
}

io::Json outputs_of(const fs::path& dir) { return io::read_json(dir / "manifest.json").at("outputs"); }

}  // namespace

TEST(Sha256, KnownDigest) {
  EXPECT_EQ(cli::sha256_hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Cli, HelpAndUsage) {
  EXPECT_EQ(run_cli({"--help"}).code, 0);
  EXPECT_EQ(run_cli({}).code, 1);
  EXPECT_EQ(run_cli({"design", "--bogus"}).code, 1);
}

TEST(CliDesign, ReferenceValues) {
  const auto dir = temp_dir("cli_design");
  const auto r = run_cli({"design", "--config", reference_config().string(), "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = io::read_json(dir / "design_report.json");
  EXPECT_NEAR(j.at("theta_critical_rad").get<double>(), 0.0133, 0.0003);
  EXPECT_NEAR(j.at("theta_optimum_rad").get<double>(), 0.0077, 0.0002);
  EXPECT_NEAR(j.at("resolution_m").get<double>(), 1.2e-4, 1e-6);
  EXPECT_NEAR(j.at("fresnel_number").get<double>(), 800.0, 20.0);
  EXPECT_NEAR(j.at("theta0_limit_rad").get<double>(), 32.0, 1.6);
  EXPECT_TRUE(fs::exists(dir / "manifest.json"));
  EXPECT_NE(r.out.find("theta"), std::string::npos);
}

TEST(CliDesign, NonPositiveBExitsWithCollimationCode) {
  const auto dir = temp_dir("cli_design_b");
  auto doc = io::read_json(reference_config());
  doc["material"]["b_m"] = -1e-15;
  io::write_json(doc, dir / "neg.json");
  const auto r = run_cli({"design", "--config", (dir / "neg.json").string(), "--out", (dir / "o").string()});
  EXPECT_EQ(r.code, static_cast<int>(ErrorCode::collimation_undefined));
  EXPECT_FALSE(r.err.empty());
}

TEST(CliDesign, SweepRowsMatchSingleRuns) {
  const auto dir = temp_dir("cli_sweep");
  const auto r = run_cli({"design", "--config", reference_config().string(), "--out", (dir / "sweep").string(),
                          "--sweep-delta", "0.01,0.03,0.05"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = io::read_json(dir / "sweep" / "design_sweep.json");
  ASSERT_EQ(rows.size(), 3u);
  const double deltas[] = {0.01, 0.03, 0.05};
  for (int i = 0; i < 3; ++i) {
    auto doc = io::read_json(reference_config());
    doc["geometry"]["sample_to_detector_m"] = deltas[i];
    const auto cfg = dir / ("d" + std::to_string(i) + ".json");
    io::write_json(doc, cfg);
    const auto out = dir / ("single" + std::to_string(i));
    ASSERT_EQ(run_cli({"design", "--config", cfg.string(), "--out", out.string()}).code, 0);
    auto single = io::read_json(out / "design_report.json");
    auto row = rows[i];
    row.erase("sample_to_detector_m");
    EXPECT_EQ(io::dump_json(row), io::dump_json(single)) << deltas[i];
  }
}

TEST(CliPipeline, DeterministicAcrossRunsAndThreads) {
  const auto dir = temp_dir("cli_det");
  const auto cfg = small_config(dir);
  ASSERT_EQ(run_cli({"pipeline", "--config", cfg.string(), "--out", (dir / "a").string(), "--threads", "1"}).code, 0);
  ASSERT_EQ(run_cli({"pipeline", "--config", cfg.string(), "--out", (dir / "b").string(), "--threads", "1"}).code, 0);
  ASSERT_EQ(run_cli({"pipeline", "--config", cfg.string(), "--out", (dir / "c").string(), "--threads", "4"}).code, 0);
  const auto a = outputs_of(dir / "a");
  EXPECT_EQ(a, outputs_of(dir / "b"));
  EXPECT_EQ(a, outputs_of(dir / "c"));
  EXPECT_TRUE(a.contains("volume_phase_retrieved.r32"));
  EXPECT_TRUE(a.contains("snr_report.json"));
  EXPECT_TRUE(a.contains("line_profiles.csv"));

  ASSERT_EQ(run_cli({"pipeline", "--config", cfg.string(), "--out", (dir / "d").string(), "--seed", "99"}).code, 0);
  EXPECT_NE(a.at("projections_counts.r32"), outputs_of(dir / "d").at("projections_counts.r32"));
  EXPECT_EQ(a.at("phantom.r32"), outputs_of(dir / "d").at("phantom.r32"));
}

TEST(CliPipeline, AttenuationOnlySkipsRetrieval) {
  const auto dir = temp_dir("cli_att");
  const auto cfg = small_config(dir);
  const auto r = run_cli({"pipeline", "--config", cfg.string(), "--out", (dir / "o").string(), "--mode",
                          "attenuation_only"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "o" / "volume_attenuation.r32"));
  EXPECT_FALSE(fs::exists(dir / "o" / "volume_phase_retrieved.r32"));
  EXPECT_FALSE(fs::exists(dir / "o" / "sinogram_phase_retrieved.json"));
  EXPECT_FALSE(fs::exists(dir / "o" / "snr_report.json"));
  EXPECT_FALSE(outputs_of(dir / "o").contains("volume_phase_retrieved.r32"));
}

TEST(CliPipeline, RetrievalFailureWithoutClampExitsFive) {
  const auto dir = temp_dir("cli_fail");
  auto doc = io::read_json(small_config(dir));
  doc["retrieval"].erase("clamp_epsilon");
  io::write_json(doc, dir / "noclamp.json");
  const auto r = run_cli({"pipeline", "--config", (dir / "noclamp.json").string(), "--out", (dir / "o").string()});
  EXPECT_EQ(r.code, static_cast<int>(ErrorCode::retrieval_nonpositive)) << r.err;
  EXPECT_NE(r.err.find("projection"), std::string::npos) << r.err;
}

TEST(CliStages, ForwardRetrieveFbpChain) {
  const auto dir = temp_dir("cli_stages");
  const auto cfg = small_config(dir);
  const std::string c = cfg.string();
  ASSERT_EQ(run_cli({"phantom", "--config", c, "--out", (dir / "ph").string()}).code, 0);
  ASSERT_EQ(run_cli({"project", "--config", c, "--out", (dir / "pr").string(), "--angles", "16"}).code, 0);
  ASSERT_TRUE(fs::exists(dir / "pr" / "manifest.json"));

  const auto rho = Raster2D::filled(32, 32, kPitch, kPitch, 1e24, RasterKind::projected_density);
  io::write_raster(rho, dir / "rho");
  auto r = run_cli({"forward", "--config", c, "--out", (dir / "fw").string(), "--input", (dir / "rho").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  ASSERT_TRUE(fs::exists(dir / "fw" / "intensity.r32"));
  r = run_cli({"retrieve", "--config", c, "--out", (dir / "rt").string(), "--input",
               (dir / "fw" / "intensity.json").string(), "--tau", "1e-8"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(io::read_json(dir / "rt" / "retrieval.json").at("tau_m2"), 1e-8);
  EXPECT_TRUE(outputs_of(dir / "rt").contains("rho_perp.r32"));

  const std::string sino = (dir / "pr" / "projected").string();
  r = run_cli({"fbp", "--out", (dir / "fb").string(), "--input", sino, "--span", "full_0_360"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "fb" / "reconstruction_slice.pgm"));
}

TEST(CliMetrics, RoiAndBoostReport) {
  const auto dir = temp_dir("cli_metrics");
  io::write_raster(random_raster(32, 32, kPitch, 1, 0.0, 1.0), dir / "pre");
  std::vector<double> v(32 * 32);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = (i % 32 < 16 ? 2.0 : 1.0) + 0.01 * double(i % 7);
  io::write_raster(Raster2D(32, 32, kPitch, kPitch, v), dir / "post");
  auto r = run_cli({"metrics", "--out", (dir / "m1").string(), "--input", (dir / "post").string(), "--roi",
                    "0,0,31,31"});
  ASSERT_EQ(r.code, 0) << r.err;
  r = run_cli({"metrics", "--out", (dir / "m2").string(), "--pre", (dir / "pre").string(), "--post",
               (dir / "post").string(), "--signal-roi", "1,1,12,30", "--background-roi", "18,1,30,30",
               "--theta-used", "0.004", "--theta0", "0.008"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = io::read_json(dir / "m2" / "snr_report.json");
  EXPECT_EQ(j.at("collimation_penalty_f"), 0.5);
  const double net = j.at("net_boost").get<double>();
  EXPECT_EQ(j.at("brilliance_boost").get<double>(), net * net);
}

TEST(CliThreads, EnvironmentFallback) {
  const auto dir = temp_dir("cli_env");
  const auto cfg = small_config(dir);
  ::setenv("PHASEBEAM_THREADS", "3", 1);
  const auto r = run_cli({"pipeline", "--config", cfg.string(), "--out", (dir / "o").string(), "--mode",
                          "attenuation_only"});
  ::unsetenv("PHASEBEAM_THREADS");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(io::read_json(dir / "o" / "manifest.json").at("threads"), 3);
}
