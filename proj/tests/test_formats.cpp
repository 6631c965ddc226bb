#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hrm3d/config.hpp"
#include "hrm3d/kitti.hpp"
#include "hrm3d/report.hpp"
#include "hrm3d/text.hpp"
#include "support.hpp"

using namespace hrm3d;

namespace {

ErrorCode code_of(const std::function<void()> &fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

std::string message_of(const std::function<void()> &fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.what();
  }
  FAIL("expected an error");
  return {};
}

bool contains(const std::string &text, const std::string &needle) {
  return text.find(needle) != std::string::npos;
}

// Fresh directory under the system temp root, removed on destruction.
struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const char *tag) {
    path = std::filesystem::temp_directory_path() /
           (std::string("hrm3d_test_") + tag);
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

std::string slurp(const std::filesystem::path &path) {
  std::ifstream in(path);
  REQUIRE(static_cast<bool>(in));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

Detection sample_detection() {
  Detection det;
  det.box.x = 2.0;
  det.box.y = 0.7;
  det.box.z = 20.0;
  det.box.l = 4.5;
  det.box.w = 1.8;
  det.box.h_box = 1.4;
  det.box.theta = 0.3;
  det.box.score = 0.5;
  det.proj.bbox2d = {700.0, 400.0, 760.0, 440.0};
  det.proj.u_c2d = 730.0;
  det.proj.v_c2d = 420.0;
  det.proj.u_c = 730.0;
  det.proj.v_c = 420.0;
  det.proj.h_2d = 40.0;
  return det;
}

KittiLabelLine random_line(std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> small(-30.0, 30.0);
  std::uniform_real_distribution<double> pos(0.5, 90.0);
  std::uniform_real_distribution<double> pix(-100.0, 1700.0);
  std::uniform_int_distribution<int> occ(0, 3);
  KittiLabelLine line;
  line.truncated = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  line.occluded = occ(rng);
  line.alpha = small(rng) / 10.0;
  line.bbox2d = {pix(rng), pix(rng), pix(rng), pix(rng)};
  line.height = pos(rng) / 20.0;
  line.width = pos(rng) / 20.0;
  line.length = pos(rng) / 10.0;
  line.x = small(rng);
  line.y = small(rng) / 10.0;
  line.z = pos(rng);
  line.rotation_y = small(rng) / 10.0;
  if (occ(rng) % 2 == 0)
    line.score = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  return line;
}

TrendReport sample_trend_report() {
  TrendReport report;
  report.grid = {-0.5, 0.0, 0.5};
  report.pitch = 0.0;

  ModelTrend source;
  source.id = ModelId::Source;
  source.empirical_slope = -20.25;
  source.predicted_slope = -20.5;
  TrendCell a;
  a.delta_h = -0.5;
  a.eval = {12.0, 40.0, 10.125, 90, 2};
  a.predicted_mde = 10.25;
  TrendCell b;
  b.delta_h = 0.0;
  b.eval = {95.0, 100.0, 0.0, 92, 0};
  b.predicted_mde = 0.0;
  TrendCell c;
  c.delta_h = 0.5;
  c.eval = {11.0, 38.0, std::nullopt, 0, 92};
  c.predicted_mde = -10.25;
  source.cells = {a, b, c};

  ModelTrend ground;
  ground.id = ModelId::Ground;
  ground.empirical_slope = 19.75;
  ground.predicted_slope = 19.5;
  a.eval.mde = -9.875;
  a.predicted_mde = -9.75;
  c.eval.mde = 9.875;
  c.eval.matched = 88;
  c.eval.missed = 4;
  c.predicted_mde = 9.75;
  ground.cells = {a, b, c};

  report.models = {source, ground};
  return report;
}

}  // namespace

TEST_CASE("kitti lines carry fifteen or sixteen two-decimal fields") {
  const Detection det = sample_detection();
  KittiLabelLine line = to_kitti(det, CameraIntrinsics{});

  const std::string with_score = write_kitti_line(line);
  CHECK(split_ws(with_score).size() == 16);

  line.score.reset();
  const std::string no_score = write_kitti_line(line);
  const std::vector<std::string_view> fields = split_ws(no_score);
  CHECK(fields.size() == 15);
  CHECK(fields[0] == "Car");
  CHECK(fields[2] == "0");
  for (std::size_t i = 1; i < fields.size(); ++i) {
    if (i == 2) continue;
    const std::string_view field = fields[i];
    const std::size_t dot = field.find('.');
    REQUIRE(dot != std::string_view::npos);
    CHECK(field.size() - dot - 1 == 2);
  }
}

TEST_CASE("kitti conversion uses bottom-face location and observation angle") {
  const Detection det = sample_detection();
  const KittiLabelLine line = to_kitti(det, CameraIntrinsics{});

  CHECK(line.y == doctest::Approx(det.box.y + 0.5 * det.box.h_box));
  CHECK(line.alpha ==
        doctest::Approx(det.box.theta - std::atan2(det.box.x, det.box.z)));
  CHECK(line.rotation_y == doctest::Approx(det.box.theta));
  CHECK(line.height == doctest::Approx(det.box.h_box));
  CHECK(line.truncated == doctest::Approx(0.0));
  CHECK(line.score.has_value());

  const Detection back = from_kitti(line);
  CHECK(back.box.y == doctest::Approx(det.box.y));
  CHECK(back.box.theta == doctest::Approx(det.box.theta));
  CHECK(back.proj.u_c2d == doctest::Approx(det.proj.u_c2d));
  CHECK(back.proj.v_c2d == doctest::Approx(det.proj.v_c2d));
  CHECK(back.proj.h_2d == doctest::Approx(det.proj.h_2d));
  CHECK(back.proj.v_c == doctest::Approx(det.proj.v_c));
}

TEST_CASE("kitti truncation is the clipped-away box fraction") {
  Detection det = sample_detection();

  det.proj.bbox2d = {-50.0, 400.0, 50.0, 440.0};
  CHECK(to_kitti(det, CameraIntrinsics{}).truncated == doctest::Approx(0.5));

  det.proj.bbox2d = {-200.0, -100.0, -100.0, -50.0};
  CHECK(to_kitti(det, CameraIntrinsics{}).truncated == doctest::Approx(1.0));

  det.proj.bbox2d = {1500.0, 800.0, 1700.0, 1000.0};
  CHECK(to_kitti(det, CameraIntrinsics{}).truncated == doctest::Approx(0.75));
}

TEST_CASE("kitti text is a fixed point after one quantization") {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 200; ++i) {
    const KittiLabelLine line = random_line(rng);
    const std::string once = write_kitti_line(line);
    const KittiLabelLine parsed = parse_kitti_line(once);
    CHECK(write_kitti_line(parsed) == once);
    CHECK(parsed.score.has_value() == line.score.has_value());
    CHECK(std::abs(parsed.z - line.z) <= 0.005 + 1e-12);
    CHECK(std::abs(parsed.alpha - line.alpha) <= 0.005 + 1e-12);
  }
}

TEST_CASE("kitti parse diagnostics name the offending field") {
  CHECK(code_of([] { parse_kitti_line("Car 0.0 0"); }) ==
        ErrorCode::ConfigInvalid);
  CHECK(contains(message_of([] { parse_kitti_line("Car 0.0 0"); }),
                 "expected 15 or 16 fields"));

  const std::string good = write_kitti_line(to_kitti(
      sample_detection(), CameraIntrinsics{}));
  std::vector<std::string_view> fields = split_ws(good);
  std::string broken;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (!broken.empty()) broken += ' ';
    broken += i == 3 ? std::string("ponder") : std::string(fields[i]);
  }
  CHECK(code_of([&] { parse_kitti_line(broken); }) == ErrorCode::ConfigInvalid);
  const std::string msg = message_of([&] { parse_kitti_line(broken); });
  CHECK(contains(msg, "alpha"));
  CHECK(contains(msg, "ponder"));
}

TEST_CASE("kitti files round-trip and report io failures") {
  TempDir dir("kitti");
  const std::filesystem::path pred_path = dir.path / "pred.txt";
  const std::filesystem::path gt_path = dir.path / "gt.txt";

  std::vector<Detection> dets;
  Detection det = sample_detection();
  dets.push_back(det);
  det.box.z = 35.0;
  det.box.score = 0.25;
  det.proj.bbox2d = {100.0, 420.0, 180.0, 470.0};
  dets.push_back(det);

  write_kitti_file(pred_path, dets, CameraIntrinsics{});
  const std::vector<Detection> read_back = read_kitti_file(pred_path);
  REQUIRE(read_back.size() == 2);
  CHECK(read_back[1].box.score == doctest::Approx(0.25));
  CHECK(read_back[1].box.z == doctest::Approx(35.0));

  write_kitti_file(gt_path, dets, CameraIntrinsics{}, false);
  const std::string gt_text = slurp(gt_path);
  for (const std::string_view line : split_lines(gt_text))
    if (!trim(line).empty()) CHECK(split_ws(line).size() == 15);
  const std::vector<Detection> gt_back = read_kitti_file(gt_path);
  REQUIRE(gt_back.size() == 2);
  CHECK(gt_back[1].box.score == doctest::Approx(1.0));

  write_kitti_file(pred_path, read_back, CameraIntrinsics{});
  CHECK(slurp(pred_path) ==
        [&] {
          write_kitti_file(gt_path, read_back, CameraIntrinsics{});
          return slurp(gt_path);
        }());

  CHECK(code_of([&] { read_kitti_file(dir.path / "missing.txt"); }) ==
        ErrorCode::IoFailure);

  const std::filesystem::path bad_path = dir.path / "bad.txt";
  std::ofstream bad(bad_path);
  bad << write_kitti_line(to_kitti(dets[0], CameraIntrinsics{})) << "\n";
  bad << "Car 1 2\n";
  bad.close();
  CHECK(code_of([&] { read_kitti_file(bad_path); }) ==
        ErrorCode::ConfigInvalid);
  CHECK(contains(message_of([&] { read_kitti_file(bad_path); }),
                 bad_path.string() + ":2:"));
}

TEST_CASE("config text parses sections, comments, and layered overrides") {
  const std::string text =
      "# sweep setup\n"
      "\n"
      "[scene]\n"
      "camera_height = 1.40\n"
      "pitch = 0.05\n"
      "focal = 720  # shorter lens\n"
      "\n"
      "[run]\n"
      "seed = 9\n"
      "frames = 33\n"
      "sigma = 0.25\n"
      "relu = off\n"
      "alpha_mode = sum\n"
      "fusion_weight = 0.25\n"
      "z_assumed = 40\n"
      "grid = -0.5, 0, 0.5\n"
      "models = source, fused\n"
      "masks = none, z\n"
      "out = results\n"
      "delta_h = 0.38\n"
      "model = ground\n";

  const RunConfig config = parse_config_text(text, "inline");
  CHECK(config.scene.camera.extr.mounting_height == doctest::Approx(1.40));
  CHECK(config.scene.camera.extr.pitch == doctest::Approx(0.05));
  CHECK(config.scene.camera.intr.f == doctest::Approx(720.0));
  CHECK(config.seed == 9);
  CHECK(config.frames == 33);
  CHECK(config.sigma == doctest::Approx(0.25));
  CHECK_FALSE(config.relu_guard);
  CHECK(config.alpha_formulation == AlphaFormulation::Sum);
  CHECK(config.fusion_weight == doctest::Approx(0.25));
  CHECK(config.z_assumed == doctest::Approx(40.0));
  REQUIRE(config.grid.size() == 3);
  CHECK(config.grid[0] == doctest::Approx(-0.5));
  REQUIRE(config.models.size() == 2);
  CHECK(config.models[0] == ModelId::Source);
  CHECK(config.models[1] == ModelId::Fused);
  REQUIRE(config.masks.size() == 2);
  CHECK(config.masks[0].empty());
  CHECK(config.masks[1] == "z");
  CHECK(config.out_dir == "results");
  CHECK(config.delta_h == doctest::Approx(0.38));
  CHECK(config.model == ModelId::Ground);

  RunConfig layered;
  layered.seed = 5;
  layered.frames = 7;
  apply_config_text(layered, "[run]\nframes = 11\n", "inline");
  CHECK(layered.seed == 5);
  CHECK(layered.frames == 11);

  const RunConfig last_wins =
      parse_config_text("[run]\nframes = 1\nframes = 2\n", "inline");
  CHECK(last_wins.frames == 2);
}

TEST_CASE("config diagnostics carry origin, line, and entry names") {
  const auto parse = [](const std::string &text) {
    return [text] { parse_config_text(text, "test.conf"); };
  };

  CHECK(code_of(parse("frames = 3\n")) == ErrorCode::ConfigInvalid);
  CHECK(contains(message_of(parse("frames = 3\n")),
                 "test.conf:1: key before any [section] header"));

  CHECK(contains(message_of(parse("[run]\nframes\n")),
                 "test.conf:2: expected 'key = value'"));

  CHECK(contains(message_of(parse("[orbit]\nframes = 3\n")),
                 "unknown section 'orbit'"));

  CHECK(contains(message_of(parse("[run]\nwarp = 3\n")),
                 "unknown key 'warp' in [run]"));
  CHECK(contains(message_of(parse("[scene]\nwarp = 3\n")),
                 "unknown key 'warp' in [scene]"));

  const std::string bad_number =
      message_of(parse("[run]\n\n# pad\nsigma = fuzzy\n"));
  CHECK(contains(bad_number, "test.conf:4:"));
  CHECK(contains(bad_number, "sigma"));
  CHECK(contains(bad_number, "fuzzy"));

  CHECK(contains(message_of(parse("[run\nframes = 3\n")),
                 "unterminated section header"));

  CHECK(code_of([] { load_config_file("/nonexistent/hrm3d.conf"); }) ==
        ErrorCode::IoFailure);
}

TEST_CASE("list helpers parse grids, models, and masks") {
  const std::vector<double> grid = parse_double_list("-0.7, -0.35,0,0.38");
  REQUIRE(grid.size() == 4);
  CHECK(grid[1] == doctest::Approx(-0.35));
  CHECK(code_of([] { parse_double_list("1,,2"); }) ==
        ErrorCode::ConfigInvalid);
  CHECK(code_of([] { parse_double_list("1,alpha"); }) ==
        ErrorCode::ConfigInvalid);

  const std::vector<ModelId> models =
      parse_model_list("source,ground,fused,compensated,compensated++");
  REQUIRE(models.size() == 5);
  CHECK(models[4] == ModelId::CompensatedPlus);
  CHECK(code_of([] { parse_model_list("source,cubist"); }) ==
        ErrorCode::ConfigInvalid);

  const std::vector<std::string> masks = parse_mask_list("none,x,xyzlwht");
  REQUIRE(masks.size() == 3);
  CHECK(masks[0].empty());
  CHECK(masks[2] == "xyzlwht");
}

TEST_CASE("canonical config is a reparse fixed point with a stable hash") {
  RunConfig config;
  config.scene.camera.extr.pitch = 0.31;
  config.scene.camera.intr.f = 707.0;
  config.scene.x_fov_proportional = true;
  config.seed = 123456789;
  config.sigma = 0.125;
  config.grid = {-0.7, 0.0, 0.7};
  config.models = {ModelId::Fused, ModelId::Ground};
  config.masks = {"", "xyz"};
  config.out_dir = "artifacts";
  config.model = ModelId::CompensatedPlus;

  const std::string canonical = canonical_config(config);
  const RunConfig reparsed = parse_config_text(canonical, "canonical");
  CHECK(canonical_config(reparsed) == canonical);
  CHECK(config_hash(reparsed) == config_hash(config));

  CHECK(contains(canonical, "masks = none, xyz"));
  CHECK(contains(canonical, "model = compensated++"));

  const std::uint64_t base = config_hash(config);
  RunConfig tweaked = config;
  tweaked.seed = 123456790;
  CHECK(config_hash(tweaked) != base);
  tweaked = config;
  tweaked.grid.push_back(0.35);
  CHECK(config_hash(tweaked) != base);
  tweaked = config;
  tweaked.scene.camera.extr.mounting_height += 1e-9;
  CHECK(config_hash(tweaked) != base);

  const RunConfig defaults;
  CHECK(canonical_config(parse_config_text(canonical_config(defaults),
                                           "canonical")) ==
        canonical_config(defaults));
}

TEST_CASE("run config maps onto sweep and oracle configurations") {
  RunConfig config;
  config.scene.camera.extr.pitch = 0.2;
  config.frames = 70;
  config.seed = 31;
  config.sigma = 0.0;
  config.relu_guard = false;
  config.alpha_formulation = AlphaFormulation::Sum;
  config.fusion_weight = 0.75;
  config.z_assumed = 42.0;
  config.grid = {0.0, 0.76};
  config.models = {ModelId::Ground};
  config.masks = {"", "z"};
  config.model = ModelId::Fused;

  const SweepConfig sweep = sweep_config(config);
  CHECK(sweep.scene.camera.extr.pitch == doctest::Approx(0.2));
  CHECK(sweep.train_frames == 70);
  CHECK(sweep.eval_frames == 70);
  CHECK(sweep.seed == 31);
  CHECK(sweep.noise.sigma == doctest::Approx(0.0));
  CHECK_FALSE(sweep.relu_guard);
  CHECK(sweep.alpha_formulation == AlphaFormulation::Sum);
  CHECK(sweep.fusion_weight == doctest::Approx(0.75));
  CHECK(sweep.z_assumed == doctest::Approx(42.0));
  REQUIRE(sweep.grid.size() == 2);
  REQUIRE(sweep.models.size() == 1);
  CHECK(sweep.models[0] == ModelId::Ground);

  const OracleConfig oracle = oracle_config(config);
  CHECK(oracle.train_scene.camera.extr.pitch == doctest::Approx(0.2));
  CHECK(oracle.eval_scene.camera.extr.pitch == doctest::Approx(0.2));
  CHECK(oracle.eval_scene.min_boxes == 1);
  CHECK(oracle.eval_scene.max_boxes == 1);
  CHECK(oracle.eval_scene.z_near == doctest::Approx(100.0));
  CHECK(oracle.eval_scene.z_far == doctest::Approx(140.0));
  CHECK(oracle.train_frames == 70);
  CHECK(oracle.eval_frames == 70);
  CHECK(oracle.seed == 31);
  CHECK(oracle.model == ModelId::Fused);
  REQUIRE(oracle.masks.size() == 2);
  CHECK(oracle.masks[1] == "z");
}

TEST_CASE("csv and table renderings are exact") {
  EvalResult result;
  result.ap3d70 = 28.4567;
  result.ap3d50 = 64.0;
  result.mde = 0.028725;
  result.matched = 1168;
  result.missed = 3;
  CHECK(eval_csv(result) ==
        "ap3d70,ap3d50,mde,matched,missed\n"
        "28.4567,64.0000,0.028725,1168,3\n");

  result.mde.reset();
  CHECK(eval_csv(result) ==
        "ap3d70,ap3d50,mde,matched,missed\n"
        "28.4567,64.0000,NA,1168,3\n");
  CHECK(contains(eval_table(result), "NA"));
  CHECK(contains(eval_table(result), "AP3D@0.70"));

  const TrendReport trend = sample_trend_report();
  const std::string csv = sweep_csv(trend);
  CHECK(contains(csv,
                 "model,delta_h,ap3d70,ap3d50,mde,predicted_mde,matched,"
                 "missed\n"));
  CHECK(contains(csv, "source,-0.500000,12.0000,40.0000,10.125000,10.250000,90,2\n"));
  CHECK(contains(csv, "source,0.500000,11.0000,38.0000,NA,-10.250000,0,92\n"));
  CHECK(contains(csv, "ground,0.000000,95.0000,100.0000,0.000000,0.000000,92,0\n"));

  const std::string table = sweep_table(trend);
  CHECK(contains(table, "source         slope   -20.2500 m/m (closed form   -20.5000 m/m)"));
  CHECK(contains(table, "ground         slope   +19.7500 m/m (closed form   +19.5000 m/m)"));

  OracleReport oracle;
  OracleCell cell;
  cell.mask = "";
  cell.delta_h = 0.76;
  cell.eval = {0.0, 0.0, -3.1511, 50, 0};
  oracle.cells.push_back(cell);
  cell.mask = "z";
  cell.eval = {66.975, 100.0, 0.0, 50, 0};
  oracle.cells.push_back(cell);
  const std::string ocsv = oracle_csv(oracle);
  CHECK(contains(ocsv, "mask,delta_h,ap3d70,ap3d50,mde,matched,missed\n"));
  CHECK(contains(ocsv, "none,0.760000,0.0000,0.0000,-3.151100,50,0\n"));
  CHECK(contains(ocsv, "z,0.760000,66.9750,100.0000,0.000000,50,0\n"));
  CHECK(contains(oracle_table(oracle), "none"));

  VerificationOutcome outcome;
  CHECK(verification_text(outcome) == "verification: PASS\n");
  outcome.passed = false;
  outcome.failures = {"slope sign", "budget exceeded"};
  CHECK(verification_text(outcome) ==
        "verification: FAIL\n  - slope sign\n  - budget exceeded\n");
}

TEST_CASE("sweep svg is deterministic and structurally complete") {
  const TrendReport trend = sample_trend_report();
  const std::string svg = sweep_svg(trend);
  CHECK(sweep_svg(trend) == svg);

  CHECK(contains(svg, "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"480\""));
  CHECK(contains(svg, "</svg>"));
  CHECK(contains(svg, "mean depth error vs camera-height offset"));
  CHECK(contains(svg, "height offset (m)"));
  CHECK(contains(svg, "#1f77b4"));
  CHECK(contains(svg, "#d62728"));
  CHECK(contains(svg, "stroke-dasharray=\"6 3\""));
  CHECK(contains(svg, "stroke=\"#999999\""));
  CHECK(contains(svg, ">source</text>"));
  CHECK(contains(svg, ">ground</text>"));

  const auto count_polylines = [](const std::string &text) {
    std::size_t n = 0;
    for (std::size_t pos = text.find("<polyline"); pos != std::string::npos;
         pos = text.find("<polyline", pos + 1))
      ++n;
    return n;
  };
  CHECK(count_polylines(svg) == 4);

  TrendReport single = trend;
  single.models.resize(1);
  CHECK(count_polylines(sweep_svg(single)) == 2);
}
