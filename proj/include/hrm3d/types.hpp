#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>

namespace hrm3d {

enum class ErrorCode {
  InvalidArgument,
  BehindCamera,
  MissingDepth,
  HorizonDegenerate,
  NotASimplex,
  DegenerateFit,
  EmptyConfigRange,
  ConfigInvalid,
  IoFailure,
  FrameMismatch,
  UnknownMask,
  VerificationFailed,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string &what) {
  throw Error(code, what);
}

// Image coordinates in pixels, lengths in meters, angles in radians.
// World frame: x right, y down toward the ground, z forward; the ground is
// the plane r.n = offset with n = (0, 1, 0) for a level camera.
struct CameraIntrinsics {
  double f = 1000.0;
  double u0 = 800.0;
  double v0 = 450.0;
  double image_width = 1600.0;
  double image_height = 900.0;

  Eigen::Matrix3d k_matrix() const;
  void validate() const;
};

struct CameraExtrinsics {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  double mounting_height = 1.51;
  double pitch = 0.0;

  void validate() const;
};

struct Camera {
  CameraIntrinsics intr;
  CameraExtrinsics extr;

  void validate() const;
};

// Plane r.n = offset in the same world frame the camera extrinsics use.
struct GroundPlane {
  Eigen::Vector3d normal{0.0, 1.0, 0.0};
  double offset = 1.51;

  void validate() const;
};

// A = R^-1 K^-1 and B = -R^-1 T of the viewing-ray parameterization
// X(z) = A [u v 1]^T z + B.
struct RayCoefficients {
  Eigen::Matrix3d a;
  Eigen::Vector3d b;
};

struct Pixel {
  double u = 0.0;
  double v = 0.0;
  std::optional<double> z;
};

using Point3D = Eigen::Vector3d;

const char *error_code_name(ErrorCode code);

}  // namespace hrm3d
