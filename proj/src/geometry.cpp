#include "hrm3d/geometry.hpp"

#include <cmath>
#include <numbers>

namespace hrm3d {

Eigen::Matrix3d CameraIntrinsics::k_matrix() const {
  Eigen::Matrix3d k;
  k << f, 0.0, u0, 0.0, f, v0, 0.0, 0.0, 1.0;
  return k;
}

void CameraIntrinsics::validate() const {
  if (!(f > 0.0)) fail(ErrorCode::InvalidArgument, "focal length must be positive");
  if (!(u0 > 0.0 && u0 < image_width) || !(v0 > 0.0 && v0 < image_height))
    fail(ErrorCode::InvalidArgument, "principal point outside the image");
}

void CameraExtrinsics::validate() const {
  const Eigen::Matrix3d gram = rotation.transpose() * rotation;
  if ((gram - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-9)
    fail(ErrorCode::InvalidArgument, "rotation is not orthonormal");
  if (!(mounting_height > 0.0))
    fail(ErrorCode::InvalidArgument, "mounting height must be positive");
  if (!(pitch > -std::numbers::pi / 2.0 && pitch <= std::numbers::pi / 2.0))
    fail(ErrorCode::InvalidArgument, "pitch outside (-pi/2, pi/2]");
}

void Camera::validate() const {
  intr.validate();
  extr.validate();
}

void GroundPlane::validate() const {
  if (std::abs(normal.norm() - 1.0) > 1e-12)
    fail(ErrorCode::InvalidArgument, "plane normal must be unit length");
}

const char *error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::BehindCamera: return "BehindCamera";
    case ErrorCode::MissingDepth: return "MissingDepth";
    case ErrorCode::HorizonDegenerate: return "HorizonDegenerate";
    case ErrorCode::NotASimplex: return "NotASimplex";
    case ErrorCode::DegenerateFit: return "DegenerateFit";
    case ErrorCode::EmptyConfigRange: return "EmptyConfigRange";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::FrameMismatch: return "FrameMismatch";
    case ErrorCode::UnknownMask: return "UnknownMask";
    case ErrorCode::VerificationFailed: return "VerificationFailed";
  }
  return "Unknown";
}

RayCoefficients ray_coefficients(const Camera &cam) {
  Eigen::Matrix3d k_inv;
  const double f = cam.intr.f;
  k_inv << 1.0 / f, 0.0, -cam.intr.u0 / f,
           0.0, 1.0 / f, -cam.intr.v0 / f,
           0.0, 0.0, 1.0;
  const Eigen::Matrix3d r_inv = cam.extr.rotation.transpose();
  return {r_inv * k_inv, -(r_inv * cam.extr.translation)};
}

Pixel project(const Point3D &p, const Camera &cam) {
  const Eigen::Vector3d c = cam.extr.rotation * p + cam.extr.translation;
  if (!(c.z() > 0.0))
    fail(ErrorCode::BehindCamera, "point projects behind the camera");
  const double u = cam.intr.f * c.x() / c.z() + cam.intr.u0;
  const double v = cam.intr.f * c.y() / c.z() + cam.intr.v0;
  return {u, v, c.z()};
}

Point3D backproject(const Pixel &px, const Camera &cam) {
  if (!px.z) fail(ErrorCode::MissingDepth, "backproject needs a pixel depth");
  const double z = *px.z;
  const Eigen::Vector3d c((px.u - cam.intr.u0) / cam.intr.f * z,
                          (px.v - cam.intr.v0) / cam.intr.f * z, z);
  return cam.extr.rotation.transpose() * (c - cam.extr.translation);
}

namespace {

double ray_plane_depth(const Pixel &px, const Camera &cam,
                       const Eigen::Vector3d &normal, double offset,
                       GroundDepthOptions opts) {
  const RayCoefficients rays = ray_coefficients(cam);
  const Eigen::Vector3d uv1(px.u, px.v, 1.0);
  const double denom = (rays.a * uv1).dot(normal);
  double num = offset - rays.b.dot(normal);
  if (opts.relu_numerator) num = std::max(num, 0.0);
  if (std::abs(denom) < kHorizonTol)
    fail(ErrorCode::HorizonDegenerate, "viewing ray parallel to the ground");
  return num / denom;
}

}  // namespace

double ground_depth(const Pixel &px, const Camera &cam,
                    const GroundPlane &plane, GroundDepthOptions opts) {
  plane.validate();
  return ray_plane_depth(px, cam, plane.normal, plane.offset, opts);
}

double ground_depth_pitched(const Pixel &px, const Camera &cam,
                            GroundDepthOptions opts) {
  const double d = cam.extr.pitch;
  const Eigen::Vector3d normal(0.0, std::cos(d), std::sin(d));
  return ray_plane_depth(px, cam, normal, cam.extr.mounting_height, opts);
}

double mixture_slope(const std::vector<double> &probs,
                     const std::vector<double> &taus) {
  if (probs.empty() || probs.size() != taus.size())
    fail(ErrorCode::InvalidArgument, "probs and taus must have equal nonzero length");
  double sum = 0.0, slope = 0.0;
  for (size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] < 0.0) fail(ErrorCode::NotASimplex, "negative probability");
    sum += probs[i];
    slope += probs[i] * taus[i];
  }
  if (std::abs(sum - 1.0) > 1e-9)
    fail(ErrorCode::NotASimplex, "probabilities do not sum to 1");
  return slope;
}

Pixel pixel_shift(const Pixel &px, double delta_h, const Camera &cam) {
  if (!px.z) fail(ErrorCode::MissingDepth, "pixel_shift needs a pixel depth");
  if ((cam.extr.rotation - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-12)
    fail(ErrorCode::InvalidArgument,
         "pixel_shift holds only for an identity rotation; compose "
         "backproject/project for general motion");
  return {px.u, px.v + cam.intr.f * delta_h / *px.z, px.z};
}

PitchInterval valid_pitch_interval(double v_b, const CameraIntrinsics &intr) {
  return {-std::atan((v_b - intr.v0) / intr.f), std::numbers::pi / 2.0};
}

}  // namespace hrm3d
