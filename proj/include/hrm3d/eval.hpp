#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "hrm3d/scene.hpp"

namespace hrm3d {

// Axis-aligned image-plane IoU of (left, top, right, bottom) boxes.
// A nonpositive union (two empty boxes) counts as no overlap.
double iou2d(const std::array<double, 4> &a, const std::array<double, 4> &b);

// Volumetric IoU of upright yawed boxes: convex bird's-eye footprint
// intersection (polygon clipping) times the vertical interval overlap.
double iou3d(const Box3D &a, const Box3D &b);

enum class MatchBy { IoU2D, IoU3D };

struct MatchPair {
  std::size_t prediction = 0;
  std::size_t gt = 0;
  double iou2d = 0.0;
  double iou3d = 0.0;
  double distance = 0.0;
};

// One greedy matching pass over a frame: predictions by descending score,
// each taking the highest-overlap still-free ground-truth box. Pairs are
// kept in that visiting order and indices refer into the DetectionSet.
struct MatchResult {
  std::vector<MatchPair> pairs;
  std::vector<std::size_t> unmatched_predictions;
  std::vector<std::size_t> unmatched_gt;
};

// `accept` is inclusive for IoU3D (detection-AP convention) and strict for
// IoU2D (depth-error convention); see match_frame.
MatchResult match_frame(const DetectionSet &frame, MatchBy by, double accept);

// 40-point interpolated average precision over all frames pooled, in percent.
// Predictions are ranked globally by score; matching is per frame at the
// given inclusive IoU3D threshold.
double average_precision(const std::vector<DetectionSet> &frames,
                         double iou3d_threshold);

// Signed mean of (predicted - true) depth over every pair with image-plane
// IoU strictly above 0.7, pooled across frames. Empty when nothing matches.
std::optional<double> mean_depth_error(const std::vector<DetectionSet> &frames);

// Which box parameters an oracle substitution replaces with ground truth.
struct OracleSpec {
  bool x = false;
  bool y = false;
  bool z = false;
  bool l = false;
  bool w = false;
  bool h = false;
  bool theta = false;
};

// Parses a mask string over characters {x,y,z,l,w,h,t}; "" is the identity
// mask. Any other character fails with UnknownMask.
OracleSpec parse_mask(std::string_view mask);

// Rewrites each prediction whose center lies within 4 m of some ground-truth
// center, copying the masked parameters from the nearest such box (lowest
// index on exact distance ties). Predictions without a neighbor pass through
// untouched and missed ground truth is never added.
DetectionSet oracle_substitute(const DetectionSet &frame,
                               const std::vector<Detection> &gt,
                               const OracleSpec &spec);

struct EvalResult {
  double ap3d70 = 0.0;
  double ap3d50 = 0.0;
  std::optional<double> mde;
  std::size_t matched = 0;
  std::size_t missed = 0;
};

// AP3D at 0.70 and 0.50, depth error, and the matched/missed tally of the
// depth-error matching, over all frames pooled.
EvalResult evaluate(const std::vector<DetectionSet> &frames);

}  // namespace hrm3d
