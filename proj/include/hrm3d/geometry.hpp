#pragma once

#include <vector>

#include "hrm3d/types.hpp"

namespace hrm3d {

// Numerically-parallel tolerance for ground rays; below it the ray never
// meets the plane at a meaningful depth.
inline constexpr double kHorizonTol = 1e-12;

struct GroundDepthOptions {
  // Clamps the numerator (plane offset minus B.n) at zero. Disable to study
  // the unguarded estimator.
  bool relu_numerator = true;
};

RayCoefficients ray_coefficients(const Camera &cam);

// Pinhole projection; the returned pixel carries the camera-frame depth.
Pixel project(const Point3D &p, const Camera &cam);

// Inverse of project; the pixel must carry a depth.
Point3D backproject(const Pixel &px, const Camera &cam);

// Depth at which the viewing ray of px meets the plane. For a level camera
// with n = (0,1,0) this is (H - b2) / (a21 u + a22 v + a23).
double ground_depth(const Pixel &px, const Camera &cam,
                    const GroundPlane &plane, GroundDepthOptions opts = {});

// Same intersection against the plane tilted by the camera's pitch field,
// n = (0, cos d, sin d), offset = mounting height. Identical to ground_depth
// at pitch 0.
double ground_depth_pitched(const Pixel &px, const Camera &cam,
                            GroundDepthOptions opts = {});

// Expectation of a discrete slope distribution: sum p_i tau_i.
double mixture_slope(const std::vector<double> &probs,
                     const std::vector<double> &taus);

// Image position of the same world point after raising the camera by
// delta_h: (u, v + f delta_h / z, z). Requires an identity rotation; general
// motion is expressed by composing backproject and project with a moved
// camera.
Pixel pixel_shift(const Pixel &px, double delta_h, const Camera &cam);

// Pitch range over which a ground ray through v_b still meets the plane in
// front of the camera: (-atan((v_b - v0)/f), pi/2], open below, closed above.
struct PitchInterval {
  double lo;
  double hi;
};
PitchInterval valid_pitch_interval(double v_b, const CameraIntrinsics &intr);

}  // namespace hrm3d
