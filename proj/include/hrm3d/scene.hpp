#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hrm3d/depth_models.hpp"
#include "hrm3d/geometry.hpp"
#include "hrm3d/types.hpp"

namespace hrm3d {

// Upright 3D box in the world frame anchored at the training-height camera.
// l runs along the heading axis, w across it, h_box vertically; theta is the
// yaw about the vertical axis (KITTI rotation_y convention).
struct Box3D {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double l = 0.0;
  double w = 0.0;
  double h_box = 0.0;
  double theta = 0.0;
  std::string cls = "Car";
  double score = 1.0;

  void validate() const;
};

std::array<Point3D, 8> box_corners(const Box3D &box);

struct SceneConfig {
  Camera camera;
  double delta_h = 0.0;
  int min_boxes = 1;
  int max_boxes = 12;
  double z_near = 5.0;
  double z_far = 60.0;
  double x_min = -15.0;
  double x_max = 15.0;
  // Narrows the lateral range to a fixed fraction of the horizontal field of
  // view at each box's depth, keeping near boxes inside the image.
  bool x_fov_proportional = false;
  std::array<double, 3> dim_mean{4.5, 1.9, 1.6};
  std::array<double, 3> dim_sigma{0.4, 0.1, 0.12};

  void validate() const;
};

// World geometry is anchored at the training-height camera: the ground plane
// keeps offset camera.extr.mounting_height, and an ego-height change delta_h
// moves the camera center to world y = -delta_h via the extrinsic translation.
struct Scene {
  Camera camera;
  double delta_h = 0.0;
  std::vector<Box3D> boxes;
  uint64_t seed = 0;
};

Camera observation_camera(const Camera &base, double delta_h);
GroundPlane scene_ground_plane(const Camera &base);

Scene generate_scene(const SceneConfig &config, uint64_t seed);

std::vector<ProjectedBox> observe(const Scene &scene, double delta_h_prime);

std::string serialize_scene(const Scene &scene);

enum class EstimatorKind { Regressed, Ground, Fused, Compensated };

// A calibrated detector head. ego_delta_h is the ego-height change of the
// camera the observations were taken from; the stack knows it through
// calibration, so the ground branch queries ground geometry at that height
// and the compensated branch undoes the induced pixel shift. The learned
// pixel-to-depth maps stay frozen at train_delta_h.
struct DepthEstimator {
  EstimatorKind kind = EstimatorKind::Regressed;
  ModelBundle models;
  double ego_delta_h = 0.0;
  double train_delta_h = 0.0;
  double z_assumed = 50.0;
};

struct Detection {
  Box3D box;
  ProjectedBox proj;
};

struct DetectionSet {
  int frame_id = 0;
  std::vector<Detection> predictions;
  std::vector<Detection> ground_truth;
};

// Emulates an idealized detector that fits the training distribution with
// zero residual: each prediction is the GT depth plus noise plus the depth
// head's response to the observable shift between train_delta_h and
// ego_delta_h. Raw responses are kept even when they drive the predicted
// depth nonpositive; such predictions are the object of study, so Box3D
// validation is not applied to them. `observed` must come from
// observe(scene, estimator.ego_delta_h).
DetectionSet emulate_detector(const Scene &scene,
                              const std::vector<ProjectedBox> &observed,
                              const DepthEstimator &estimator,
                              const NoiseModel &noise, uint64_t seed);

}  // namespace hrm3d
