#include "hrm3d/depth_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hrm3d/text.hpp"

namespace hrm3d {

void ProjectedBox::validate() const {
  if (!(h_2d > 0.0)) fail(ErrorCode::InvalidArgument, "2D box height must be positive");
  if (!(bbox2d[0] < bbox2d[2]) || !(bbox2d[1] < bbox2d[3]))
    fail(ErrorCode::InvalidArgument, "2D box corners out of order");
  if (std::abs(v_c2d - 0.5 * (bbox2d[1] + bbox2d[3])) > 1e-9)
    fail(ErrorCode::InvalidArgument, "2D box center inconsistent with corners");
}

RegressedDepthModel RegressedDepthModel::from_range(double z_min, double z_max,
                                                    const CameraIntrinsics &intr) {
  if (!(z_min > 0.0) || !(z_max > z_min))
    fail(ErrorCode::InvalidArgument, "depth range needs z_max > z_min > 0");
  RegressedDepthModel m;
  m.z_min = z_min;
  m.z_max = z_max;
  m.beta = (z_max - z_min) / (intr.image_height - intr.v0);
  return m;
}

void FusionModel::validate() const {
  if (!(weight >= 0.0 && weight <= 1.0))
    fail(ErrorCode::InvalidArgument, "fusion weight must lie in [0, 1]");
}

void NoiseModel::validate() const {
  if (!(sigma >= 0.0)) fail(ErrorCode::InvalidArgument, "noise sigma must be nonnegative");
}

Pixel bottom_center(const ProjectedBox &pb, const GroundDepthModel &model) {
  pb.validate();
  const double base = pb.v_c + 0.5 * pb.h_2d;
  const double v_b = model.formulation == AlphaFormulation::Product
                         ? base + model.alpha * (pb.v_c - pb.v_c2d)
                         : base + model.alpha;
  return {pb.u_c, v_b, std::nullopt};
}

double ground_estimate(const ProjectedBox &pb, const Camera &cam,
                       const GroundDepthModel &model) {
  const Pixel pb_px = bottom_center(pb, model);
  if (model.relu_guard) {
    const RayCoefficients rc = ray_coefficients(cam);
    const Eigen::Vector3d normal(0.0, std::cos(cam.extr.pitch), std::sin(cam.extr.pitch));
    const double denom =
        (rc.a * Eigen::Vector3d(pb_px.u, pb_px.v, 1.0)).dot(normal);
    if (denom <= kHorizonTol)
      fail(ErrorCode::HorizonDegenerate, "bottom center at or above the horizon");
  }
  return ground_depth_pitched(pb_px, cam);
}

double regressed_estimate(const ProjectedBox &pb, const RegressedDepthModel &model,
                          const CameraIntrinsics &intr) {
  return -model.beta * (pb.v_c - intr.v0) + model.z_max;
}

double fused_estimate(const ProjectedBox &pb, const Camera &cam,
                      const GroundDepthModel &g, const RegressedDepthModel &r,
                      const FusionModel &fusion) {
  fusion.validate();
  const double regressed = regressed_estimate(pb, r, cam.intr);
  const double ground = ground_estimate(pb, cam, g);
  return fusion.weight * regressed + (1.0 - fusion.weight) * ground;
}

double compensated_estimate(const ProjectedBox &pb, double delta_h, double z_assumed,
                            const RegressedDepthModel &r, const Camera &cam) {
  if (!(z_assumed > 0.0))
    fail(ErrorCode::InvalidArgument, "assumed compensation depth must be positive");
  ProjectedBox shifted = pb;
  shifted.v_c -= cam.intr.f * delta_h / z_assumed;
  return regressed_estimate(shifted, r, cam.intr);
}

double predicted_ground_bias(double v_b, double delta_h, const Camera &cam,
                             double delta) {
  const double row = v_b - cam.intr.v0;
  if (delta == 0.0) {
    const double guarded = row > 0.0 ? 1.0 / row : 0.0;
    return guarded * cam.intr.f * delta_h;
  }
  return cam.intr.f * delta_h / (row * std::cos(delta) + cam.intr.f * std::sin(delta));
}

double predicted_regress_bias(double z, double delta_h, double beta, double f) {
  if (!(z > 0.0)) fail(ErrorCode::InvalidArgument, "depth must be positive");
  return -(beta / z) * f * delta_h;
}

RegressedDepthModel calibrate_regressor(const std::vector<RegressorSample> &samples,
                                        const CameraIntrinsics &intr) {
  if (samples.size() < 2)
    fail(ErrorCode::DegenerateFit, "regressor calibration needs at least 2 samples");
  double mean_x = 0.0, mean_z = 0.0;
  for (const RegressorSample &s : samples) {
    mean_x += s.v_c - intr.v0;
    mean_z += s.z;
  }
  mean_x /= static_cast<double>(samples.size());
  mean_z /= static_cast<double>(samples.size());
  double sxx = 0.0, sxz = 0.0;
  for (const RegressorSample &s : samples) {
    const double dx = (s.v_c - intr.v0) - mean_x;
    sxx += dx * dx;
    sxz += dx * (s.z - mean_z);
  }
  if (sxx < 1e-12)
    fail(ErrorCode::DegenerateFit, "all samples share one image row");
  const double slope = sxz / sxx;
  RegressedDepthModel m;
  m.beta = -slope;
  m.z_max = mean_z - slope * mean_x;
  m.z_min = m.z_max - m.beta * (intr.image_height - intr.v0);
  return m;
}

double calibrate_alpha(const std::vector<AlphaSample> &samples, AlphaFormulation mode) {
  if (samples.empty())
    fail(ErrorCode::DegenerateFit, "alpha calibration needs samples");
  if (mode == AlphaFormulation::Sum) {
    double acc = 0.0;
    for (const AlphaSample &s : samples) acc += s.v_b_true - s.v_c - 0.5 * s.h_2d;
    return acc / static_cast<double>(samples.size());
  }
  double sxx = 0.0, sxr = 0.0;
  for (const AlphaSample &s : samples) {
    const double x = s.v_c - s.v_c2d;
    const double r = s.v_b_true - s.v_c - 0.5 * s.h_2d;
    sxx += x * x;
    sxr += x * r;
  }
  if (sxx < 1e-12)
    fail(ErrorCode::DegenerateFit, "projected and 2D centers coincide everywhere");
  return sxr / sxx;
}

double calibrate_fusion_weight(const std::vector<FusionSample> &samples) {
  if (samples.empty())
    fail(ErrorCode::DegenerateFit, "fusion calibration needs samples");
  double sxx = 0.0, sxy = 0.0;
  for (const FusionSample &s : samples) {
    const double x = s.regressed - s.ground;
    sxx += x * x;
    sxy += x * (s.z - s.ground);
  }
  if (sxx < 1e-12)
    fail(ErrorCode::DegenerateFit, "component estimates coincide everywhere");
  return std::clamp(sxy / sxx, 0.0, 1.0);
}

std::string serialize_models(const ModelBundle &bundle) {
  std::string out = "hrm3d-models v1\n";
  out += "beta " + format_double(bundle.regressed.beta) + "\n";
  out += "z_min " + format_double(bundle.regressed.z_min) + "\n";
  out += "z_max " + format_double(bundle.regressed.z_max) + "\n";
  out += "alpha " + format_double(bundle.ground.alpha) + "\n";
  out += std::string("formulation ") +
         (bundle.ground.formulation == AlphaFormulation::Product ? "product" : "sum") +
         "\n";
  out += std::string("relu_guard ") + (bundle.ground.relu_guard ? "on" : "off") + "\n";
  out += "w " + format_double(bundle.fusion.weight) + "\n";
  out += "sigma " + format_double(bundle.noise.sigma) + "\n";
  return out;
}

ModelBundle parse_models(const std::string &text) {
  const std::vector<std::string_view> lines = split_lines(text);
  if (lines.empty() || trim(lines[0]) != "hrm3d-models v1")
    fail(ErrorCode::ConfigInvalid, "missing or unsupported model header");
  ModelBundle bundle;
  unsigned seen = 0;
  for (size_t i = 1; i < lines.size(); ++i) {
    const std::string_view line = trim(lines[i]);
    if (line.empty()) continue;
    const std::vector<std::string_view> parts = split_ws(line);
    if (parts.size() != 2)
      fail(ErrorCode::ConfigInvalid,
           "model line " + std::to_string(i + 1) + " is not 'key value'");
    const std::string_view key = parts[0], value = parts[1];
    double num = 0.0;
    const bool numeric = parse_double(value, num);
    auto need_number = [&] {
      if (!numeric)
        fail(ErrorCode::ConfigInvalid, std::string(key) + " needs a numeric value");
      return num;
    };
    if (key == "beta") bundle.regressed.beta = need_number();
    else if (key == "z_min") bundle.regressed.z_min = need_number();
    else if (key == "z_max") bundle.regressed.z_max = need_number();
    else if (key == "alpha") bundle.ground.alpha = need_number();
    else if (key == "w") bundle.fusion.weight = need_number();
    else if (key == "sigma") bundle.noise.sigma = need_number();
    else if (key == "formulation") {
      if (value == "product") bundle.ground.formulation = AlphaFormulation::Product;
      else if (value == "sum") bundle.ground.formulation = AlphaFormulation::Sum;
      else fail(ErrorCode::ConfigInvalid, "formulation must be product or sum");
    } else if (key == "relu_guard") {
      if (value == "on") bundle.ground.relu_guard = true;
      else if (value == "off") bundle.ground.relu_guard = false;
      else fail(ErrorCode::ConfigInvalid, "relu_guard must be on or off");
    } else {
      fail(ErrorCode::ConfigInvalid, "unknown model key " + std::string(key));
    }
    ++seen;
  }
  if (seen != 8) fail(ErrorCode::ConfigInvalid, "model file must set all 8 keys");
  bundle.noise.validate();
  bundle.fusion.validate();
  return bundle;
}

}  // namespace hrm3d
