#include "hrm3d/trend.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>

#include "hrm3d/rng.hpp"

#include "hrm3d/text.hpp"

namespace hrm3d {

namespace {

void validate_grid(const std::vector<double> &grid, bool needs_zero) {
  if (grid.empty())
    fail(ErrorCode::EmptyConfigRange, "height-offset grid is empty");
  std::vector<double> sorted = grid;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    fail(ErrorCode::ConfigInvalid, "height-offset grid repeats a value");
  if (needs_zero &&
      std::find(sorted.begin(), sorted.end(), 0.0) == sorted.end())
    fail(ErrorCode::ConfigInvalid,
         "height-offset grid must contain the training offset 0");
}

void validate_shared(int train_frames, int eval_frames, double fusion_weight,
                     const NoiseModel &noise, double z_assumed) {
  if (train_frames < 1 || eval_frames < 1)
    fail(ErrorCode::ConfigInvalid, "frame counts must be at least 1");
  FusionModel{fusion_weight}.validate();
  noise.validate();
  if (!(z_assumed > 0.0))
    fail(ErrorCode::ConfigInvalid, "assumed compensation depth must be positive");
}

std::vector<std::uint64_t> draw_seeds(std::uint64_t seed, std::uint64_t stream,
                                      int count) {
  std::mt19937_64 rng = seeded_rng(seed, stream);
  std::vector<std::uint64_t> out(static_cast<std::size_t>(count));
  for (std::uint64_t &s : out) s = rng();
  return out;
}

// Per-box closed-form error of a model under a height offset, evaluated at
// the box's true depth and the model's own anchored bottom-center row.
double predicted_bias(ModelId id, const CalibratedModels &calib,
                      const Camera &base, double delta_h, double z,
                      double v_b0) {
  const double beta = calib.bundle.regressed.beta;
  const double f = base.intr.f;
  switch (id) {
    case ModelId::Source:
      return predicted_regress_bias(z, delta_h, beta, f);
    case ModelId::Ground:
      return predicted_ground_bias(v_b0, delta_h, base, base.extr.pitch);
    case ModelId::Fused: {
      const double w = calib.bundle.fusion.weight;
      return w * predicted_regress_bias(z, delta_h, beta, f) +
             (1.0 - w) *
                 predicted_ground_bias(v_b0, delta_h, base, base.extr.pitch);
    }
    case ModelId::Compensated:
      return predicted_regress_bias(z, delta_h, beta, f) +
             beta * f * delta_h / calib.z_assumed;
    case ModelId::CompensatedPlus:
      return predicted_regress_bias(z, delta_h, beta, f) +
             beta * f * delta_h / calib.z_assumed_plus;
  }
  fail(ErrorCode::InvalidArgument, "unhandled model id");
}

double ols_slope(const std::vector<std::pair<double, double>> &points) {
  if (points.size() < 2) return 0.0;
  double mx = 0.0;
  double my = 0.0;
  for (const auto &[x, y] : points) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(points.size());
  my /= static_cast<double>(points.size());
  double sxx = 0.0;
  double sxy = 0.0;
  for (const auto &[x, y] : points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (sxx <= 0.0) return 0.0;
  return sxy / sxx;
}

const ModelTrend *find_model(const TrendReport &report, ModelId id) {
  for (const ModelTrend &m : report.models)
    if (m.id == id) return &m;
  return nullptr;
}

const TrendCell *find_cell(const ModelTrend &trend, double delta_h) {
  for (const TrendCell &c : trend.cells)
    if (c.delta_h == delta_h) return &c;
  return nullptr;
}

}  // namespace

ModelId parse_model(std::string_view name) {
  if (name == "source") return ModelId::Source;
  if (name == "ground") return ModelId::Ground;
  if (name == "fused") return ModelId::Fused;
  if (name == "compensated") return ModelId::Compensated;
  if (name == "compensated++") return ModelId::CompensatedPlus;
  fail(ErrorCode::ConfigInvalid,
       "unknown model '" + std::string(name) + "'");
}

std::string model_name(ModelId id) {
  switch (id) {
    case ModelId::Source: return "source";
    case ModelId::Ground: return "ground";
    case ModelId::Fused: return "fused";
    case ModelId::Compensated: return "compensated";
    case ModelId::CompensatedPlus: return "compensated++";
  }
  fail(ErrorCode::InvalidArgument, "unhandled model id");
}

CalibratedModels calibrate_models(const SceneConfig &scene, int frames,
                                  std::uint64_t seed,
                                  AlphaFormulation formulation,
                                  bool relu_guard, double sigma,
                                  double fusion_weight, double z_assumed) {
  scene.validate();
  validate_shared(frames, 1, fusion_weight, NoiseModel{sigma}, z_assumed);

  const std::vector<std::uint64_t> seeds = draw_seeds(seed, 1, frames);
  std::vector<RegressorSample> reg_samples;
  std::vector<AlphaSample> alpha_samples;
  double inv_z_sum = 0.0;
  std::size_t n_boxes = 0;
  for (std::uint64_t s : seeds) {
    const Scene world = generate_scene(scene, s);
    const std::vector<ProjectedBox> anchored = observe(world, 0.0);
    const Camera cam0 = observation_camera(world.camera, 0.0);
    for (std::size_t i = 0; i < world.boxes.size(); ++i) {
      const Box3D &box = world.boxes[i];
      const ProjectedBox &pb = anchored[i];
      reg_samples.push_back({pb.v_c, box.z});
      const Pixel bottom = project(
          Point3D(box.x, box.y + 0.5 * box.h_box, box.z), cam0);
      alpha_samples.push_back({pb.v_c, pb.v_c2d, pb.h_2d, bottom.v});
      inv_z_sum += 1.0 / box.z;
      ++n_boxes;
    }
  }

  CalibratedModels out;
  out.bundle.regressed = calibrate_regressor(reg_samples, scene.camera.intr);
  out.bundle.ground.alpha = calibrate_alpha(alpha_samples, formulation);
  out.bundle.ground.formulation = formulation;
  out.bundle.ground.relu_guard = relu_guard;
  out.bundle.fusion.weight = fusion_weight;
  out.bundle.noise.sigma = sigma;
  out.z_assumed = z_assumed;
  out.z_assumed_plus = static_cast<double>(n_boxes) / inv_z_sum;
  return out;
}

DepthEstimator model_estimator(ModelId id, const CalibratedModels &calib,
                               double ego_delta_h) {
  DepthEstimator est;
  est.models = calib.bundle;
  est.ego_delta_h = ego_delta_h;
  est.train_delta_h = 0.0;
  switch (id) {
    case ModelId::Source:
      est.kind = EstimatorKind::Regressed;
      break;
    case ModelId::Ground:
      est.kind = EstimatorKind::Ground;
      break;
    case ModelId::Fused:
      est.kind = EstimatorKind::Fused;
      break;
    case ModelId::Compensated:
      est.kind = EstimatorKind::Compensated;
      est.z_assumed = calib.z_assumed;
      break;
    case ModelId::CompensatedPlus:
      est.kind = EstimatorKind::Compensated;
      est.z_assumed = calib.z_assumed_plus;
      break;
  }
  return est;
}

void SweepConfig::validate() const {
  scene.validate();
  validate_grid(grid, true);
  validate_shared(train_frames, eval_frames, fusion_weight, noise, z_assumed);
  if (models.empty())
    fail(ErrorCode::ConfigInvalid, "sweep needs at least one model");
  for (std::size_t i = 0; i < models.size(); ++i)
    for (std::size_t j = i + 1; j < models.size(); ++j)
      if (models[i] == models[j])
        fail(ErrorCode::ConfigInvalid,
             "sweep lists model '" + model_name(models[i]) + "' twice");
}

TrendReport run_sweep(const SweepConfig &config) {
  config.validate();
  const CalibratedModels calib = calibrate_models(
      config.scene, config.train_frames, config.seed,
      config.alpha_formulation, config.relu_guard, config.noise.sigma,
      config.fusion_weight, config.z_assumed);

  const std::vector<std::uint64_t> scene_seeds =
      draw_seeds(config.seed, 2, config.eval_frames);
  const std::vector<std::uint64_t> noise_seeds =
      draw_seeds(config.seed, 3, config.eval_frames);

  std::vector<Scene> worlds;
  worlds.reserve(scene_seeds.size());
  for (std::uint64_t s : scene_seeds)
    worlds.push_back(generate_scene(config.scene, s));

  // Anchored rows and true depths feed the closed-form predictions.
  const Camera base = config.scene.camera;
  std::vector<std::vector<double>> v_b0(worlds.size());
  std::vector<std::vector<double>> z_true(worlds.size());
  for (std::size_t f = 0; f < worlds.size(); ++f) {
    const std::vector<ProjectedBox> anchored = observe(worlds[f], 0.0);
    for (std::size_t i = 0; i < anchored.size(); ++i) {
      v_b0[f].push_back(bottom_center(anchored[i], calib.bundle.ground).v);
      z_true[f].push_back(worlds[f].boxes[i].z);
    }
  }

  TrendReport report;
  report.grid = config.grid;
  std::sort(report.grid.begin(), report.grid.end());
  report.pitch = base.extr.pitch;
  report.models.resize(config.models.size());
  for (std::size_t m = 0; m < config.models.size(); ++m)
    report.models[m].id = config.models[m];

  for (double delta_h : report.grid) {
    std::vector<std::vector<DetectionSet>> frames(config.models.size());
    for (std::size_t f = 0; f < worlds.size(); ++f) {
      const std::vector<ProjectedBox> observed = observe(worlds[f], delta_h);
      for (std::size_t m = 0; m < config.models.size(); ++m) {
        const DepthEstimator est =
            model_estimator(config.models[m], calib, delta_h);
        DetectionSet ds = emulate_detector(worlds[f], observed, est,
                                           calib.bundle.noise, noise_seeds[f]);
        ds.frame_id = static_cast<int>(f);
        frames[m].push_back(std::move(ds));
      }
    }
    for (std::size_t m = 0; m < config.models.size(); ++m) {
      TrendCell cell;
      cell.delta_h = delta_h;
      cell.eval = evaluate(frames[m]);
      double sum = 0.0;
      std::size_t n = 0;
      for (std::size_t f = 0; f < worlds.size(); ++f)
        for (std::size_t i = 0; i < z_true[f].size(); ++i) {
          sum += predicted_bias(config.models[m], calib, base, delta_h,
                                z_true[f][i], v_b0[f][i]);
          ++n;
        }
      cell.predicted_mde = n == 0 ? 0.0 : sum / static_cast<double>(n);
      report.models[m].cells.push_back(cell);
    }
  }

  for (ModelTrend &trend : report.models) {
    std::vector<std::pair<double, double>> emp;
    std::vector<std::pair<double, double>> pred;
    for (const TrendCell &cell : trend.cells) {
      if (cell.eval.mde.has_value())
        emp.push_back({cell.delta_h, *cell.eval.mde});
      pred.push_back({cell.delta_h, cell.predicted_mde});
    }
    trend.empirical_slope = ols_slope(emp);
    trend.predicted_slope = ols_slope(pred);
  }
  return report;
}

VerificationOutcome verify_theorems(const TrendReport &report,
                                    const TheoremTolerances &tol) {
  VerificationOutcome out;
  auto flag = [&out](const std::string &msg) {
    out.passed = false;
    out.failures.push_back(msg);
  };

  const ModelTrend *source = find_model(report, ModelId::Source);
  const ModelTrend *ground = find_model(report, ModelId::Ground);
  const ModelTrend *fused = find_model(report, ModelId::Fused);

  auto mean_checks = [&](const ModelTrend &trend, bool positive_slope) {
    const std::string name = model_name(trend.id);
    std::size_t with_mde = 0;
    for (const TrendCell &c : trend.cells)
      if (c.eval.mde.has_value()) ++with_mde;
    if (with_mde < 2) {
      flag(name + " trend slope needs two grid rows with matched pairs");
    } else if (positive_slope && !(trend.empirical_slope > 0.0)) {
      flag(name + " trend slope " + format_double(trend.empirical_slope) +
           " is not positive");
    } else if (!positive_slope && !(trend.empirical_slope < 0.0)) {
      flag(name + " trend slope " + format_double(trend.empirical_slope) +
           " is not negative");
    }

    const TrendCell *zero = find_cell(trend, 0.0);
    if (zero == nullptr || !zero->eval.mde.has_value()) {
      flag(name + " trend lacks a matched zero-offset reference row");
      return;
    }
    for (const TrendCell &cell : trend.cells) {
      if (cell.delta_h == 0.0) continue;
      if (!cell.eval.mde.has_value()) {
        flag(name + " mean error at offset " + format_fixed(cell.delta_h, 3) +
             " has no matched pairs");
        continue;
      }
      const double emp_delta = *cell.eval.mde - *zero->eval.mde;
      const double pred_delta = cell.predicted_mde - zero->predicted_mde;
      const double gap = std::abs(emp_delta - pred_delta);
      const double budget = report.pitch != 0.0
                                ? tol.pitched_rel * std::abs(pred_delta)
                                : tol.mean_abs;
      if (gap > budget)
        flag(name + " mean error at offset " + format_fixed(cell.delta_h, 3) +
             " misses the closed form by " + format_double(gap) +
             " (budget " + format_double(budget) + ")");
    }
  };

  if (source != nullptr) mean_checks(*source, false);
  if (ground != nullptr) mean_checks(*ground, true);

  if (fused != nullptr) {
    if (source == nullptr || ground == nullptr) {
      flag("fused comparison needs source and ground rows in the sweep");
      return out;
    }
    for (const TrendCell &cell : fused->cells) {
      if (std::abs(cell.delta_h) < tol.fused_min_delta_h) continue;
      const TrendCell *s = find_cell(*source, cell.delta_h);
      const TrendCell *g = find_cell(*ground, cell.delta_h);
      if (s == nullptr || g == nullptr || !cell.eval.mde.has_value() ||
          !s->eval.mde.has_value() || !g->eval.mde.has_value()) {
        flag("fused comparison at offset " + format_fixed(cell.delta_h, 3) +
             " lacks matched rows");
        continue;
      }
      const double f_abs = std::abs(*cell.eval.mde);
      if (!(f_abs < std::abs(*s->eval.mde)))
        flag("fused |mean error| " + format_double(f_abs) + " at offset " +
             format_fixed(cell.delta_h, 3) + " is not below the source's " +
             format_double(std::abs(*s->eval.mde)));
      if (!(f_abs < std::abs(*g->eval.mde)))
        flag("fused |mean error| " + format_double(f_abs) + " at offset " +
             format_fixed(cell.delta_h, 3) + " is not below the ground's " +
             format_double(std::abs(*g->eval.mde)));
    }
  }
  return out;
}

SceneConfig oracle_eval_family() {
  SceneConfig c;
  c.min_boxes = 1;
  c.max_boxes = 1;
  c.z_near = 100.0;
  c.z_far = 140.0;
  return c;
}

void OracleConfig::validate() const {
  train_scene.validate();
  eval_scene.validate();
  validate_grid(grid, false);
  validate_shared(train_frames, eval_frames, fusion_weight, noise, z_assumed);
  if (masks.empty())
    fail(ErrorCode::ConfigInvalid, "breakdown needs at least one mask");
  for (const std::string &mask : masks) parse_mask(mask);
}

OracleReport oracle_breakdown(const OracleConfig &config) {
  config.validate();
  const CalibratedModels calib = calibrate_models(
      config.train_scene, config.train_frames, config.seed,
      config.alpha_formulation, config.relu_guard, config.noise.sigma,
      config.fusion_weight, config.z_assumed);

  const std::vector<std::uint64_t> scene_seeds =
      draw_seeds(config.seed, 2, config.eval_frames);
  const std::vector<std::uint64_t> noise_seeds =
      draw_seeds(config.seed, 3, config.eval_frames);

  std::vector<double> grid = config.grid;
  std::sort(grid.begin(), grid.end());

  std::vector<std::vector<DetectionSet>> baseline(grid.size());
  for (std::size_t f = 0; f < scene_seeds.size(); ++f) {
    const Scene world = generate_scene(config.eval_scene, scene_seeds[f]);
    for (std::size_t d = 0; d < grid.size(); ++d) {
      const std::vector<ProjectedBox> observed = observe(world, grid[d]);
      const DepthEstimator est =
          model_estimator(config.model, calib, grid[d]);
      DetectionSet ds = emulate_detector(world, observed, est,
                                         calib.bundle.noise, noise_seeds[f]);
      ds.frame_id = static_cast<int>(f);
      baseline[d].push_back(std::move(ds));
    }
  }

  OracleReport report;
  for (const std::string &mask : config.masks) {
    const OracleSpec spec = parse_mask(mask);
    for (std::size_t d = 0; d < grid.size(); ++d) {
      std::vector<DetectionSet> substituted;
      substituted.reserve(baseline[d].size());
      for (const DetectionSet &frame : baseline[d])
        substituted.push_back(
            oracle_substitute(frame, frame.ground_truth, spec));
      OracleCell cell;
      cell.mask = mask;
      cell.delta_h = grid[d];
      cell.eval = evaluate(substituted);
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

}  // namespace hrm3d
