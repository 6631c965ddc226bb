#include "hrm3d/runner.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "hrm3d/kitti.hpp"
#include "hrm3d/report.hpp"
#include "hrm3d/rng.hpp"
#include "hrm3d/text.hpp"

namespace hrm3d {

namespace {

void ensure_dir(const std::filesystem::path &dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
    fail(ErrorCode::IoFailure,
         "cannot create directory '" + dir.string() + "': " + ec.message());
}

void write_text(const std::filesystem::path &path, const std::string &text) {
  std::ofstream out(path);
  if (!out)
    fail(ErrorCode::IoFailure, "cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) fail(ErrorCode::IoFailure, "write to '" + path.string() + "' failed");
}

std::filesystem::path frame_file(const std::filesystem::path &dir, int index) {
  char name[16];
  std::snprintf(name, sizeof name, "%06d.txt", index);
  return dir / name;
}

std::vector<std::string> frame_ids(const std::filesystem::path &dir) {
  if (!std::filesystem::is_directory(dir))
    fail(ErrorCode::IoFailure, "'" + dir.string() + "' is not a directory");
  std::vector<std::string> ids;
  for (const auto &entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".txt")
      ids.push_back(entry.path().stem().string());
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::string join(const std::vector<std::string> &items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i)
    out += (i == 0 ? "" : ", ") + items[i];
  return out;
}

}  // namespace

int cmd_simulate(const RunConfig &config) {
  if (config.frames < 0)
    fail(ErrorCode::ConfigInvalid, "frame count must be nonnegative");
  config.scene.validate();

  const std::filesystem::path out_dir(config.out_dir);
  ensure_dir(out_dir);

  char hash_text[32];
  std::snprintf(hash_text, sizeof hash_text, "%016llx",
                static_cast<unsigned long long>(config_hash(config)));
  std::string manifest = "hrm3d-simulate v1\n";
  manifest += "seed = " + std::to_string(config.seed) + "\n";
  manifest += std::string("config_hash = ") + hash_text + "\n";
  manifest += "frames = " + std::to_string(config.frames) + "\n";
  manifest += "delta_h = " + format_double(config.delta_h) + "\n";
  manifest += "model = " + model_name(config.model) + "\n";
  write_text(out_dir / "manifest.txt", manifest);
  write_text(out_dir / "config.txt", canonical_config(config));
  if (config.frames == 0) return 0;

  const CalibratedModels calib = calibrate_models(
      config.scene, config.frames, config.seed, config.alpha_formulation,
      config.relu_guard, config.sigma, config.fusion_weight,
      config.z_assumed);
  const DepthEstimator estimator =
      model_estimator(config.model, calib, config.delta_h);

  const std::filesystem::path gt_dir = out_dir / "gt";
  const std::filesystem::path pred_dir = out_dir / "pred";
  ensure_dir(gt_dir);
  ensure_dir(pred_dir);

  std::mt19937_64 scene_rng = seeded_rng(config.seed, 2);
  std::mt19937_64 noise_rng = seeded_rng(config.seed, 3);
  for (int f = 0; f < config.frames; ++f) {
    const Scene world = generate_scene(config.scene, scene_rng());
    const std::vector<ProjectedBox> observed = observe(world, config.delta_h);
    const DetectionSet frame = emulate_detector(world, observed, estimator,
                                                calib.bundle.noise,
                                                noise_rng());
    write_kitti_file(frame_file(gt_dir, f), frame.ground_truth,
                     config.scene.camera.intr, false);
    write_kitti_file(frame_file(pred_dir, f), frame.predictions,
                     config.scene.camera.intr, true);
  }
  return 0;
}

int cmd_eval(const RunConfig &config, const std::filesystem::path &gt_dir,
             const std::filesystem::path &pred_dir) {
  const std::vector<std::string> gt_ids = frame_ids(gt_dir);
  const std::vector<std::string> pred_ids = frame_ids(pred_dir);

  std::vector<std::string> missing_pred;
  std::vector<std::string> missing_gt;
  std::set_difference(gt_ids.begin(), gt_ids.end(), pred_ids.begin(),
                      pred_ids.end(), std::back_inserter(missing_pred));
  std::set_difference(pred_ids.begin(), pred_ids.end(), gt_ids.begin(),
                      gt_ids.end(), std::back_inserter(missing_gt));
  if (!missing_pred.empty() || !missing_gt.empty()) {
    std::string what = "frame ids do not match";
    if (!missing_pred.empty())
      what += "; missing in predictions: " + join(missing_pred);
    if (!missing_gt.empty())
      what += "; missing in ground truth: " + join(missing_gt);
    fail(ErrorCode::FrameMismatch, what);
  }
  if (gt_ids.empty())
    fail(ErrorCode::FrameMismatch, "no label files in '" + gt_dir.string() + "'");

  std::vector<DetectionSet> frames;
  frames.reserve(gt_ids.size());
  for (std::size_t i = 0; i < gt_ids.size(); ++i) {
    DetectionSet ds;
    ds.frame_id = static_cast<int>(i);
    ds.ground_truth = read_kitti_file(gt_dir / (gt_ids[i] + ".txt"));
    ds.predictions = read_kitti_file(pred_dir / (gt_ids[i] + ".txt"));
    frames.push_back(std::move(ds));
  }

  const EvalResult result = evaluate(frames);
  const std::filesystem::path out_dir(config.out_dir);
  ensure_dir(out_dir);
  write_text(out_dir / "eval.csv", eval_csv(result));
  write_text(out_dir / "eval.txt", eval_table(result));
  std::fputs(eval_table(result).c_str(), stdout);
  return 0;
}

int cmd_sweep(const RunConfig &config) {
  const TrendReport report = run_sweep(sweep_config(config));
  const VerificationOutcome outcome = verify_theorems(report);

  const std::filesystem::path out_dir(config.out_dir);
  ensure_dir(out_dir);
  write_text(out_dir / "sweep.csv", sweep_csv(report));
  write_text(out_dir / "sweep.svg", sweep_svg(report));
  write_text(out_dir / "verification.txt", verification_text(outcome));
  std::fputs(sweep_table(report).c_str(), stdout);
  std::fputs("\n", stdout);
  std::fputs(verification_text(outcome).c_str(), stdout);
  return outcome.passed ? 0 : 2;
}

int cmd_oracle(const RunConfig &config) {
  const OracleReport report = oracle_breakdown(oracle_config(config));

  const std::filesystem::path out_dir(config.out_dir);
  ensure_dir(out_dir);
  write_text(out_dir / "oracle.csv", oracle_csv(report));
  write_text(out_dir / "oracle.txt", oracle_table(report));
  std::fputs(oracle_table(report).c_str(), stdout);
  return 0;
}

}  // namespace hrm3d
