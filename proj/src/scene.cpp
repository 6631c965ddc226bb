#include "hrm3d/scene.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "hrm3d/rng.hpp"
#include "hrm3d/text.hpp"

namespace hrm3d {

void Box3D::validate() const {
  if (!(l > 0.0 && w > 0.0 && h_box > 0.0))
    fail(ErrorCode::InvalidArgument, "box dimensions must be positive");
  if (!(z > 0.0)) fail(ErrorCode::InvalidArgument, "box must be in front of the camera");
  if (!(score >= 0.0 && score <= 1.0))
    fail(ErrorCode::InvalidArgument, "box score must lie in [0, 1]");
}

std::array<Point3D, 8> box_corners(const Box3D &box) {
  const double c = std::cos(box.theta), s = std::sin(box.theta);
  std::array<Point3D, 8> corners;
  int k = 0;
  for (double sx : {-0.5, 0.5})
    for (double sy : {-0.5, 0.5})
      for (double sz : {-0.5, 0.5}) {
        const double bx = sx * box.l, by = sy * box.h_box, bz = sz * box.w;
        corners[k++] = Point3D(box.x + c * bx + s * bz, box.y + by,
                               box.z - s * bx + c * bz);
      }
  return corners;
}

void SceneConfig::validate() const {
  camera.validate();
  if (min_boxes > max_boxes || z_near > z_far || x_min > x_max)
    fail(ErrorCode::EmptyConfigRange, "scene config has an inverted range");
  if (min_boxes < 0) fail(ErrorCode::ConfigInvalid, "box count must be nonnegative");
  if (!(z_near > 0.0)) fail(ErrorCode::ConfigInvalid, "depth range must start above 0");
  for (double m : dim_mean)
    if (!(m > 0.0)) fail(ErrorCode::ConfigInvalid, "dimension means must be positive");
  for (double s : dim_sigma)
    if (!(s >= 0.0)) fail(ErrorCode::ConfigInvalid, "dimension sigmas must be nonnegative");
}

Camera observation_camera(const Camera &base, double delta_h) {
  Camera cam = base;
  cam.extr.translation = Eigen::Vector3d(0.0, delta_h, 0.0);
  return cam;
}

GroundPlane scene_ground_plane(const Camera &base) {
  const double pitch = base.extr.pitch;
  return {Eigen::Vector3d(0.0, std::cos(pitch), std::sin(pitch)),
          base.extr.mounting_height};
}

Scene generate_scene(const SceneConfig &config, uint64_t seed) {
  config.validate();
  Scene scene;
  scene.camera = config.camera;
  scene.camera.extr.translation = Eigen::Vector3d::Zero();
  scene.delta_h = config.delta_h;
  scene.seed = seed;

  auto rng = seeded_rng(seed);
  std::uniform_int_distribution<int> count(config.min_boxes, config.max_boxes);
  std::uniform_real_distribution<double> depth(config.z_near, config.z_far);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> yaw(-std::numbers::pi, std::numbers::pi);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const double h_mount = config.camera.extr.mounting_height;
  const double pitch = config.camera.extr.pitch;
  const int n = count(rng);
  scene.boxes.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    Box3D box;
    box.z = depth(rng);
    double lo = config.x_min, hi = config.x_max;
    if (config.x_fov_proportional) {
      const double half =
          0.8 * box.z * config.camera.intr.u0 / config.camera.intr.f;
      lo = std::max(lo, -half);
      hi = std::min(hi, half);
    }
    box.x = lo + (hi - lo) * unit(rng);
    box.theta = yaw(rng);
    const auto draw_dim = [&](int j) {
      const double v = config.dim_sigma[j] > 0.0
                           ? config.dim_mean[j] + config.dim_sigma[j] * gauss(rng)
                           : config.dim_mean[j];
      return std::max(v, 0.1);
    };
    box.l = draw_dim(0);
    box.w = draw_dim(1);
    box.h_box = draw_dim(2);
    const double y_bottom = (h_mount - box.z * std::sin(pitch)) / std::cos(pitch);
    box.y = y_bottom - box.h_box / 2.0;
    box.validate();
    scene.boxes.push_back(std::move(box));
  }
  return scene;
}

std::vector<ProjectedBox> observe(const Scene &scene, double delta_h_prime) {
  const Camera cam = observation_camera(scene.camera, delta_h_prime);
  std::vector<ProjectedBox> out;
  out.reserve(scene.boxes.size());
  for (const Box3D &box : scene.boxes) {
    const Pixel center = project(Point3D(box.x, box.y, box.z), cam);
    ProjectedBox pb;
    pb.u_c = center.u;
    pb.v_c = center.v;
    double min_u = 0.0, max_u = 0.0, min_v = 0.0, max_v = 0.0;
    bool first = true;
    for (const Point3D &corner : box_corners(box)) {
      const Pixel px = project(corner, cam);
      if (first) {
        min_u = max_u = px.u;
        min_v = max_v = px.v;
        first = false;
      } else {
        min_u = std::min(min_u, px.u);
        max_u = std::max(max_u, px.u);
        min_v = std::min(min_v, px.v);
        max_v = std::max(max_v, px.v);
      }
    }
    pb.bbox2d = {min_u, min_v, max_u, max_v};
    pb.u_c2d = 0.5 * (min_u + max_u);
    pb.v_c2d = 0.5 * (min_v + max_v);
    pb.h_2d = max_v - min_v;
    pb.validate();
    out.push_back(pb);
  }
  return out;
}

std::string serialize_scene(const Scene &scene) {
  std::string out = "hrm3d-scene v1\n";
  out += "seed " + std::to_string(scene.seed) + "\n";
  out += "delta_h " + format_double(scene.delta_h) + "\n";
  const CameraIntrinsics &intr = scene.camera.intr;
  const CameraExtrinsics &extr = scene.camera.extr;
  out += "camera " + format_double(intr.f) + " " + format_double(intr.u0) + " " +
         format_double(intr.v0) + " " + format_double(intr.image_width) + " " +
         format_double(intr.image_height) + " " +
         format_double(extr.mounting_height) + " " + format_double(extr.pitch) + "\n";
  for (const Box3D &box : scene.boxes) {
    out += "box " + format_double(box.x) + " " + format_double(box.y) + " " +
           format_double(box.z) + " " + format_double(box.l) + " " +
           format_double(box.w) + " " + format_double(box.h_box) + " " +
           format_double(box.theta) + " " + box.cls + " " +
           format_double(box.score) + "\n";
  }
  return out;
}

namespace {

double estimator_response(const DepthEstimator &estimator, const Camera &base,
                          const ProjectedBox &observed, const ProjectedBox &anchored) {
  const Camera cam_train = observation_camera(base, estimator.train_delta_h);
  const Camera cam_test = observation_camera(base, estimator.ego_delta_h);
  const ModelBundle &m = estimator.models;

  const auto regressed_response = [&] {
    return regressed_estimate(observed, m.regressed, base.intr) -
           regressed_estimate(anchored, m.regressed, base.intr);
  };
  const auto ground_response = [&] {
    return ground_estimate(anchored, cam_test, m.ground) -
           ground_estimate(anchored, cam_train, m.ground);
  };

  switch (estimator.kind) {
    case EstimatorKind::Regressed:
      return regressed_response();
    case EstimatorKind::Ground:
      return ground_response();
    case EstimatorKind::Fused:
      return m.fusion.weight * regressed_response() +
             (1.0 - m.fusion.weight) * ground_response();
    case EstimatorKind::Compensated:
      return compensated_estimate(observed,
                                  estimator.ego_delta_h - estimator.train_delta_h,
                                  estimator.z_assumed, m.regressed, cam_train) -
             regressed_estimate(anchored, m.regressed, base.intr);
  }
  fail(ErrorCode::InvalidArgument, "unknown estimator kind");
}

}  // namespace

DetectionSet emulate_detector(const Scene &scene,
                              const std::vector<ProjectedBox> &observed,
                              const DepthEstimator &estimator,
                              const NoiseModel &noise, uint64_t seed) {
  if (observed.size() != scene.boxes.size())
    fail(ErrorCode::FrameMismatch, "observations do not match the scene boxes");
  noise.validate();

  const Camera cam_test = observation_camera(scene.camera, estimator.ego_delta_h);
  const std::vector<ProjectedBox> anchored = observe(scene, estimator.train_delta_h);
  auto rng = seeded_rng(seed);
  std::normal_distribution<double> eta(0.0, noise.sigma > 0.0 ? noise.sigma : 1.0);
  std::uniform_real_distribution<double> score(0.5, 1.0);

  DetectionSet out;
  out.predictions.reserve(scene.boxes.size());
  out.ground_truth.reserve(scene.boxes.size());
  for (size_t i = 0; i < scene.boxes.size(); ++i) {
    const Box3D &gt = scene.boxes[i];
    const ProjectedBox &pb = observed[i];

    const double response = estimator_response(estimator, scene.camera, pb, anchored[i]);
    const double noise_draw = noise.sigma > 0.0 ? eta(rng) : 0.0;
    const double z_hat = gt.z + noise_draw + response;

    Box3D pred = gt;
    const Point3D center = backproject({pb.u_c, pb.v_c, z_hat}, cam_test);
    pred.x = center.x();
    pred.y = center.y();
    pred.z = center.z();
    pred.score = score(rng);

    out.ground_truth.push_back({gt, pb});
    out.predictions.push_back({std::move(pred), pb});
  }
  return out;
}

}  // namespace hrm3d
