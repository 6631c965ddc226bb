#pragma once

#include <array>
#include <string>
#include <vector>

#include "hrm3d/geometry.hpp"
#include "hrm3d/types.hpp"

namespace hrm3d {

// Per-object observables a 2D detector stage would report: projected 3D
// center, 2D box center/height, and the raw 2D box (left, top, right, bottom).
struct ProjectedBox {
  double u_c = 0.0;
  double v_c = 0.0;
  double u_c2d = 0.0;
  double v_c2d = 0.0;
  double h_2d = 0.0;
  std::array<double, 4> bbox2d{0.0, 0.0, 0.0, 0.0};

  void validate() const;
};

enum class AlphaFormulation { Product, Sum };

// Bottom-center ground lookup with a learnable shift alpha. In product form
// alpha is dimensionless; in sum form it is in pixels.
struct GroundDepthModel {
  double alpha = 0.0;
  AlphaFormulation formulation = AlphaFormulation::Product;
  bool relu_guard = true;
};

// Linear depth-from-row model: z_hat = -beta * (v_c - v0) + z_max.
struct RegressedDepthModel {
  double beta = 0.0;
  double z_min = 0.0;
  double z_max = 0.0;

  // Constructs from a depth range mapped across [v0, image bottom]; enforces
  // z_max > z_min > 0. Calibration output skips that check because a
  // least-squares fit on real geometry may extrapolate z_min below zero.
  static RegressedDepthModel from_range(double z_min, double z_max,
                                        const CameraIntrinsics &intr);
};

struct FusionModel {
  double weight = 0.5;
  void validate() const;
};

struct NoiseModel {
  double sigma = 0.5;
  void validate() const;
};

Pixel bottom_center(const ProjectedBox &pb, const GroundDepthModel &model);

double ground_estimate(const ProjectedBox &pb, const Camera &cam,
                       const GroundDepthModel &model);

double regressed_estimate(const ProjectedBox &pb, const RegressedDepthModel &model,
                          const CameraIntrinsics &intr);

double fused_estimate(const ProjectedBox &pb, const Camera &cam,
                      const GroundDepthModel &g, const RegressedDepthModel &r,
                      const FusionModel &fusion);

double compensated_estimate(const ProjectedBox &pb, double delta_h, double z_assumed,
                            const RegressedDepthModel &r, const Camera &cam);

// Analytic mean-error references. They take true quantities (v_b at the
// training height, true z) and are not estimators.
double predicted_ground_bias(double v_b, double delta_h, const Camera &cam,
                             double delta = 0.0);
double predicted_regress_bias(double z, double delta_h, double beta, double f);

struct RegressorSample {
  double v_c = 0.0;
  double z = 0.0;
};

RegressedDepthModel calibrate_regressor(const std::vector<RegressorSample> &samples,
                                        const CameraIntrinsics &intr);

struct AlphaSample {
  double v_c = 0.0;
  double v_c2d = 0.0;
  double h_2d = 0.0;
  double v_b_true = 0.0;
};

double calibrate_alpha(const std::vector<AlphaSample> &samples, AlphaFormulation mode);

struct FusionSample {
  double ground = 0.0;
  double regressed = 0.0;
  double z = 0.0;
};

double calibrate_fusion_weight(const std::vector<FusionSample> &samples);

struct ModelBundle {
  RegressedDepthModel regressed;
  GroundDepthModel ground;
  FusionModel fusion;
  NoiseModel noise;
};

std::string serialize_models(const ModelBundle &bundle);
ModelBundle parse_models(const std::string &text);

}  // namespace hrm3d
