#include "hrm3d/kitti.hpp"

#include "hrm3d/text.hpp"
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

namespace hrm3d {

namespace {

double clipped_fraction(const std::array<double, 4> &bbox,
                        const CameraIntrinsics &intr) {
  const double area = (bbox[2] - bbox[0]) * (bbox[3] - bbox[1]);
  if (!(area > 0.0)) return 0.0;
  const double ix = std::max(
      0.0, std::min(bbox[2], intr.image_width) - std::max(bbox[0], 0.0));
  const double iy = std::max(
      0.0, std::min(bbox[3], intr.image_height) - std::max(bbox[1], 0.0));
  const double visible = ix * iy / area;
  return std::clamp(1.0 - visible, 0.0, 1.0);
}

double parse_number(std::string_view token, const char *field) {
  double value = 0.0;
  if (!parse_double(token, value))
    fail(ErrorCode::ConfigInvalid, std::string("field '") + field +
                                       "': bad number '" +
                                       std::string(token) + "'");
  return value;
}

std::string format_fields(const KittiLabelLine &line) {
  char buf[256];
  int n = std::snprintf(
      buf, sizeof buf,
      "%s %.2f %d %.2f %.2f %.2f %.2f %.2f %.2f %.2f %.2f %.2f %.2f %.2f %.2f",
      line.type.c_str(), line.truncated, line.occluded, line.alpha,
      line.bbox2d[0], line.bbox2d[1], line.bbox2d[2], line.bbox2d[3],
      line.height, line.width, line.length, line.x, line.y, line.z,
      line.rotation_y);
  std::string out(buf, static_cast<std::size_t>(n));
  if (line.score.has_value()) {
    n = std::snprintf(buf, sizeof buf, " %.2f", *line.score);
    out.append(buf, static_cast<std::size_t>(n));
  }
  return out;
}

}  // namespace

KittiLabelLine to_kitti(const Detection &det, const CameraIntrinsics &intr) {
  KittiLabelLine line;
  line.type = det.box.cls;
  line.truncated = clipped_fraction(det.proj.bbox2d, intr);
  line.occluded = 0;
  line.alpha = det.box.theta - std::atan2(det.box.x, det.box.z);
  line.bbox2d = det.proj.bbox2d;
  line.height = det.box.h_box;
  line.width = det.box.w;
  line.length = det.box.l;
  line.x = det.box.x;
  line.y = det.box.y + 0.5 * det.box.h_box;
  line.z = det.box.z;
  line.rotation_y = det.box.theta;
  line.score = det.box.score;
  return line;
}

Detection from_kitti(const KittiLabelLine &line) {
  Detection det;
  det.box.cls = line.type;
  det.box.x = line.x;
  det.box.y = line.y - 0.5 * line.height;
  det.box.z = line.z;
  det.box.l = line.length;
  det.box.w = line.width;
  det.box.h_box = line.height;
  det.box.theta = line.rotation_y;
  det.box.score = line.score.value_or(1.0);
  det.proj.bbox2d = line.bbox2d;
  det.proj.u_c2d = 0.5 * (line.bbox2d[0] + line.bbox2d[2]);
  det.proj.v_c2d = 0.5 * (line.bbox2d[1] + line.bbox2d[3]);
  det.proj.h_2d = line.bbox2d[3] - line.bbox2d[1];
  det.proj.u_c = det.proj.u_c2d;
  det.proj.v_c = det.proj.v_c2d;
  return det;
}

std::string write_kitti_line(const KittiLabelLine &line) {
  return format_fields(line);
}

KittiLabelLine parse_kitti_line(std::string_view text) {
  const std::vector<std::string_view> fields = split_ws(trim(text));
  if (fields.size() != 15 && fields.size() != 16)
    fail(ErrorCode::ConfigInvalid,
         "expected 15 or 16 fields, got " + std::to_string(fields.size()));

  KittiLabelLine line;
  line.type = std::string(fields[0]);
  line.truncated = parse_number(fields[1], "truncated");
  line.occluded =
      static_cast<int>(parse_number(fields[2], "occluded"));
  line.alpha = parse_number(fields[3], "alpha");
  for (int i = 0; i < 4; ++i)
    line.bbox2d[static_cast<std::size_t>(i)] =
        parse_number(fields[static_cast<std::size_t>(4 + i)], "bbox");
  line.height = parse_number(fields[8], "height");
  line.width = parse_number(fields[9], "width");
  line.length = parse_number(fields[10], "length");
  line.x = parse_number(fields[11], "x");
  line.y = parse_number(fields[12], "y");
  line.z = parse_number(fields[13], "z");
  line.rotation_y = parse_number(fields[14], "rotation_y");
  if (fields.size() == 16) line.score = parse_number(fields[15], "score");
  return line;
}

void write_kitti_file(const std::filesystem::path &path,
                      const std::vector<Detection> &dets,
                      const CameraIntrinsics &intr, bool with_score) {
  std::ofstream out(path);
  if (!out)
    fail(ErrorCode::IoFailure, "cannot open '" + path.string() + "' for writing");
  for (const Detection &det : dets) {
    KittiLabelLine line = to_kitti(det, intr);
    if (!with_score) line.score.reset();
    out << write_kitti_line(line) << '\n';
  }
  out.flush();
  if (!out) fail(ErrorCode::IoFailure, "write to '" + path.string() + "' failed");
}

std::vector<Detection> read_kitti_file(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    fail(ErrorCode::IoFailure, "cannot open '" + path.string() + "' for reading");
  std::vector<Detection> out;
  std::string text;
  int line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    if (split_ws(text).empty()) continue;
    try {
      out.push_back(from_kitti(parse_kitti_line(text)));
    } catch (const Error &e) {
      fail(e.code(), path.string() + ":" + std::to_string(line_no) + ": " +
                         e.what());
    }
  }
  return out;
}

}  // namespace hrm3d
