#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "hrm3d/geometry.hpp"
#include "hrm3d/rng.hpp"
#include "hrm3d/scene.hpp"
#include "hrm3d/types.hpp"

// Shared test plumbing: seeded generators for cameras/pixels and independent
// reference implementations the library results are checked against.
namespace ts {

inline Eigen::Matrix3d random_rotation(std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u1 = unit(rng), u2 = unit(rng), u3 = unit(rng);
  const double two_pi = 2.0 * std::numbers::pi;
  const Eigen::Quaterniond q(std::sqrt(u1) * std::cos(two_pi * u3),
                             std::sqrt(1.0 - u1) * std::sin(two_pi * u2),
                             std::sqrt(1.0 - u1) * std::cos(two_pi * u2),
                             std::sqrt(u1) * std::sin(two_pi * u3));
  return q.toRotationMatrix();
}

// Modest rotations keep most of the image usable in ray tests; the math is
// exercised for arbitrary axes regardless.
inline Eigen::Matrix3d random_small_rotation(std::mt19937_64 &rng, double max_angle) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Eigen::Vector3d axis(unit(rng), unit(rng), unit(rng));
  if (axis.norm() < 1e-6) axis = Eigen::Vector3d::UnitX();
  axis.normalize();
  std::uniform_real_distribution<double> ang(-max_angle, max_angle);
  return Eigen::AngleAxisd(ang(rng), axis).toRotationMatrix();
}

inline hrm3d::Camera random_camera(std::mt19937_64 &rng, bool rotated = true) {
  std::uniform_real_distribution<double> focal(500.0, 2000.0);
  std::uniform_real_distribution<double> shift(-0.4, 0.4);
  std::uniform_real_distribution<double> height(1.0, 2.0);
  hrm3d::Camera cam;
  cam.intr.f = focal(rng);
  cam.intr.image_width = 1600.0;
  cam.intr.image_height = 900.0;
  cam.intr.u0 = 800.0 + 100.0 * shift(rng);
  cam.intr.v0 = 450.0 + 100.0 * shift(rng);
  if (rotated) cam.extr.rotation = random_small_rotation(rng, 0.35);
  cam.extr.translation =
      Eigen::Vector3d(shift(rng), shift(rng), shift(rng));
  cam.extr.mounting_height = height(rng);
  return cam;
}

inline hrm3d::Pixel random_image_pixel(std::mt19937_64 &rng, const hrm3d::Camera &cam) {
  std::uniform_real_distribution<double> du(0.0, cam.intr.image_width);
  std::uniform_real_distribution<double> dv(0.0, cam.intr.image_height);
  return {du(rng), dv(rng), std::nullopt};
}

// Projection reference: homogeneous 3x4 matrix product, no shared code with
// hrm3d::project.
inline hrm3d::Pixel project_oracle(const Eigen::Vector3d &x, const hrm3d::Camera &cam) {
  Eigen::Matrix<double, 3, 4> p;
  p.leftCols<3>() = cam.extr.rotation;
  p.col(3) = cam.extr.translation;
  p = cam.intr.k_matrix() * p;
  const Eigen::Vector3d uvw = p * Eigen::Vector4d(x.x(), x.y(), x.z(), 1.0);
  return {uvw.x() / uvw.z(), uvw.y() / uvw.z(), uvw.z()};
}

// Ray evaluation straight from the coefficients, for checking backproject.
inline Eigen::Vector3d ray_point_oracle(const hrm3d::Pixel &px, double z,
                                        const hrm3d::Camera &cam) {
  const hrm3d::RayCoefficients rc = hrm3d::ray_coefficients(cam);
  return rc.a * Eigen::Vector3d(px.u, px.v, 1.0) * z + rc.b;
}

// Ground-depth reference: build two ray points by LU solves, intersect the
// line with the plane parametrically. Depth varies linearly along the ray,
// so the hit depth is 1 + t for anchors at depths 1 and 2.
inline double ray_plane_oracle(const hrm3d::Pixel &px, const hrm3d::Camera &cam,
                               const Eigen::Vector3d &normal, double offset) {
  const Eigen::Vector3d uv1(px.u, px.v, 1.0);
  auto world_at = [&](double z) -> Eigen::Vector3d {
    const Eigen::Vector3d c = cam.intr.k_matrix().fullPivLu().solve(uv1 * z);
    return cam.extr.rotation.fullPivLu().solve(c - cam.extr.translation);
  };
  const Eigen::Vector3d x1 = world_at(1.0);
  const Eigen::Vector3d d = world_at(2.0) - x1;
  return 1.0 + (offset - normal.dot(x1)) / normal.dot(d);
}

// Counter-style generator for the volume sampler below; cheap enough to draw
// one word per grid cell.
struct SplitMix64 {
  std::uint64_t state;
  std::uint64_t next() {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
};

// Volumetric IoU reference: exact vertical-interval overlap times a
// footprint-intersection area estimated by a jittered 1000x1000 grid over
// the intersection of the two footprint bounding rectangles. One million
// point-in-box tests, no shared code with the polygon clipper.
inline double mc_iou3d_oracle(const hrm3d::Box3D &a, const hrm3d::Box3D &b,
                              std::uint64_t seed) {
  const double overlap =
      std::min(a.y + 0.5 * a.h_box, b.y + 0.5 * b.h_box) -
      std::max(a.y - 0.5 * a.h_box, b.y - 0.5 * b.h_box);
  if (overlap <= 0.0) return 0.0;

  auto bev_bounds = [](const hrm3d::Box3D &box, double &x0, double &x1,
                       double &z0, double &z1) {
    const double r = 0.5 * std::abs(box.l * std::cos(box.theta)) +
                     0.5 * std::abs(box.w * std::sin(box.theta));
    const double s = 0.5 * std::abs(box.l * std::sin(box.theta)) +
                     0.5 * std::abs(box.w * std::cos(box.theta));
    x0 = box.x - r;
    x1 = box.x + r;
    z0 = box.z - s;
    z1 = box.z + s;
  };
  double ax0, ax1, az0, az1, bx0, bx1, bz0, bz1;
  bev_bounds(a, ax0, ax1, az0, az1);
  bev_bounds(b, bx0, bx1, bz0, bz1);
  const double x0 = std::max(ax0, bx0);
  const double x1 = std::min(ax1, bx1);
  const double z0 = std::max(az0, bz0);
  const double z1 = std::min(az1, bz1);
  if (x1 <= x0 || z1 <= z0) return 0.0;

  struct Frame {
    double c, s, cx, cz, hl, hw;
  };
  auto frame_of = [](const hrm3d::Box3D &box) {
    return Frame{std::cos(box.theta), std::sin(box.theta),
                 box.x,               box.z,
                 0.5 * box.l,         0.5 * box.w};
  };
  const Frame fa = frame_of(a);
  const Frame fb = frame_of(b);
  auto inside = [](const Frame &f, double px, double pz) {
    const double dx = px - f.cx;
    const double dz = pz - f.cz;
    const double bl = f.c * dx - f.s * dz;
    const double bw = f.s * dx + f.c * dz;
    return std::abs(bl) <= f.hl && std::abs(bw) <= f.hw;
  };

  constexpr int kGrid = 1000;
  SplitMix64 rng{seed};
  const double sx = (x1 - x0) / kGrid;
  const double sz = (z1 - z0) / kGrid;
  std::uint64_t hits = 0;
  for (int gx = 0; gx < kGrid; ++gx) {
    for (int gz = 0; gz < kGrid; ++gz) {
      const std::uint64_t word = rng.next();
      const double jx = static_cast<double>(word >> 32) / 4294967296.0;
      const double jz = static_cast<double>(word & 0xffffffffull) / 4294967296.0;
      const double px = x0 + (gx + jx) * sx;
      const double pz = z0 + (gz + jz) * sz;
      if (inside(fa, px, pz) && inside(fb, px, pz)) ++hits;
    }
  }
  const double bev = static_cast<double>(hits) /
                     (static_cast<double>(kGrid) * kGrid) * (x1 - x0) *
                     (z1 - z0);
  const double inter = bev * overlap;
  const double uni = a.l * a.w * a.h_box + b.l * b.w * b.h_box - inter;
  return inter / uni;
}

}  // namespace ts
