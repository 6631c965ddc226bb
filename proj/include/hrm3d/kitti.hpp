#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hrm3d/scene.hpp"

namespace hrm3d {

// One whitespace-separated label line in the KITTI detection convention:
// type truncated occluded alpha bbox(4) dimensions(h w l) location(x y z)
// rotation_y [score]. Numeric fields carry 2-decimal fixed precision, so
// write/parse round-trips are exact at that precision.
struct KittiLabelLine {
  std::string type = "Car";
  double truncated = 0.0;
  int occluded = 0;
  double alpha = 0.0;
  std::array<double, 4> bbox2d{0.0, 0.0, 0.0, 0.0};
  double height = 0.0;
  double width = 0.0;
  double length = 0.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double rotation_y = 0.0;
  std::optional<double> score;
};

// The location is the bottom-face center (y_center + h/2 in the y-down
// frame) and alpha is the observation angle theta - atan2(x, z). Truncation
// is the clipped-away fraction of the 2D box, clamped to [0, 1].
KittiLabelLine to_kitti(const Detection &det, const CameraIntrinsics &intr);

// Inverse of to_kitti up to format precision. The projected-center fields
// are reconstructed from the 2D box alone, which is all the evaluation
// metrics read.
Detection from_kitti(const KittiLabelLine &line);

std::string write_kitti_line(const KittiLabelLine &line);

// Errors: ConfigInvalid naming the offending field and token.
KittiLabelLine parse_kitti_line(std::string_view text);

// Ground-truth files conventionally omit the trailing score field; pass
// with_score = false to drop it.
void write_kitti_file(const std::filesystem::path &path,
                      const std::vector<Detection> &dets,
                      const CameraIntrinsics &intr, bool with_score = true);

// Errors: IoFailure when the file cannot be opened; ConfigInvalid with a
// line number prefix when a line does not parse.
std::vector<Detection> read_kitti_file(const std::filesystem::path &path);

}  // namespace hrm3d
