#include "hrm3d/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace hrm3d {

namespace {

constexpr double kOracleRadiusM = 4.0;
constexpr double kEdgeTol = 1e-9;

using Pt = Eigen::Vector2d;

// Footprint corners in the (x, z) ground plane, perimeter order, consistent
// with the 3D corner layout of box_corners.
std::array<Pt, 4> bev_footprint(const Box3D &b) {
  const double c = std::cos(b.theta);
  const double s = std::sin(b.theta);
  const double hl = 0.5 * b.l;
  const double hw = 0.5 * b.w;
  const std::array<std::array<double, 2>, 4> local{
      {{hl, hw}, {hl, -hw}, {-hl, -hw}, {-hl, hw}}};
  std::array<Pt, 4> out;
  for (std::size_t i = 0; i < 4; ++i) {
    const double bx = local[i][0];
    const double bz = local[i][1];
    out[i] = Pt(b.x + c * bx + s * bz, b.z - s * bx + c * bz);
  }
  return out;
}

double signed_area(const std::vector<Pt> &poly) {
  double twice = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Pt &p = poly[i];
    const Pt &q = poly[(i + 1) % poly.size()];
    twice += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * twice;
}

// Sutherland-Hodgman clip of a convex subject against a convex quad. Points
// within kEdgeTol meters of a clip edge count as inside, so identical or
// edge-sharing footprints keep their vertices instead of spawning slivers.
std::vector<Pt> clip_convex(std::vector<Pt> poly, std::array<Pt, 4> clip) {
  if (signed_area({clip.begin(), clip.end()}) < 0.0)
    std::reverse(clip.begin(), clip.end());
  for (std::size_t e = 0; e < 4 && !poly.empty(); ++e) {
    const Pt p0 = clip[e];
    const Pt dir = clip[(e + 1) % 4] - p0;
    const double len = dir.norm();
    if (len < kEdgeTol) continue;
    std::vector<Pt> in = std::move(poly);
    poly.clear();
    for (std::size_t i = 0; i < in.size(); ++i) {
      const Pt &a = in[i];
      const Pt &b = in[(i + 1) % in.size()];
      const double da =
          (dir.x() * (a.y() - p0.y()) - dir.y() * (a.x() - p0.x())) / len;
      const double db =
          (dir.x() * (b.y() - p0.y()) - dir.y() * (b.x() - p0.x())) / len;
      const bool in_a = da >= -kEdgeTol;
      const bool in_b = db >= -kEdgeTol;
      if (in_a) poly.push_back(a);
      if (in_a != in_b) poly.push_back(a + (da / (da - db)) * (b - a));
    }
  }
  return poly;
}

double center_distance(const Box3D &a, const Box3D &b) {
  return Eigen::Vector3d(a.x - b.x, a.y - b.y, a.z - b.z).norm();
}

double pair_overlap(const DetectionSet &frame, std::size_t pi, std::size_t gi,
                    MatchBy by) {
  const Detection &p = frame.predictions[pi];
  const Detection &g = frame.ground_truth[gi];
  return by == MatchBy::IoU2D ? iou2d(p.proj.bbox2d, g.proj.bbox2d)
                              : iou3d(p.box, g.box);
}

}  // namespace

double iou2d(const std::array<double, 4> &a, const std::array<double, 4> &b) {
  const double iw = std::min(a[2], b[2]) - std::max(a[0], b[0]);
  const double ih = std::min(a[3], b[3]) - std::max(a[1], b[1]);
  const double inter = std::max(iw, 0.0) * std::max(ih, 0.0);
  const double area_a =
      std::max(a[2] - a[0], 0.0) * std::max(a[3] - a[1], 0.0);
  const double area_b =
      std::max(b[2] - b[0], 0.0) * std::max(b[3] - b[1], 0.0);
  const double uni = area_a + area_b - inter;
  if (uni <= 0.0) return 0.0;
  return inter / uni;
}

double iou3d(const Box3D &a, const Box3D &b) {
  const double overlap = std::min(a.y + 0.5 * a.h_box, b.y + 0.5 * b.h_box) -
                         std::max(a.y - 0.5 * a.h_box, b.y - 0.5 * b.h_box);
  if (overlap <= 0.0) return 0.0;
  const std::array<Pt, 4> fa = bev_footprint(a);
  const std::array<Pt, 4> fb = bev_footprint(b);
  const std::vector<Pt> inter = clip_convex({fa.begin(), fa.end()}, fb);
  if (inter.size() < 3) return 0.0;
  const double inter_vol = std::abs(signed_area(inter)) * overlap;
  const double uni =
      a.l * a.w * a.h_box + b.l * b.w * b.h_box - inter_vol;
  if (uni <= 0.0) return 0.0;
  return inter_vol / uni;
}

MatchResult match_frame(const DetectionSet &frame, MatchBy by, double accept) {
  std::vector<std::size_t> order(frame.predictions.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) {
                     return frame.predictions[i].box.score >
                            frame.predictions[j].box.score;
                   });

  MatchResult out;
  std::vector<bool> taken(frame.ground_truth.size(), false);
  for (std::size_t pi : order) {
    double best = -1.0;
    std::size_t best_gt = 0;
    for (std::size_t gi = 0; gi < frame.ground_truth.size(); ++gi) {
      if (taken[gi]) continue;
      const double ov = pair_overlap(frame, pi, gi, by);
      if (ov > best) {
        best = ov;
        best_gt = gi;
      }
    }
    const bool pass = by == MatchBy::IoU2D ? best > accept : best >= accept;
    if (best < 0.0 || !pass) {
      out.unmatched_predictions.push_back(pi);
      continue;
    }
    taken[best_gt] = true;
    const Detection &p = frame.predictions[pi];
    const Detection &g = frame.ground_truth[best_gt];
    MatchPair pair;
    pair.prediction = pi;
    pair.gt = best_gt;
    pair.iou2d = iou2d(p.proj.bbox2d, g.proj.bbox2d);
    pair.iou3d = iou3d(p.box, g.box);
    pair.distance = center_distance(p.box, g.box);
    out.pairs.push_back(pair);
  }
  for (std::size_t gi = 0; gi < taken.size(); ++gi)
    if (!taken[gi]) out.unmatched_gt.push_back(gi);
  return out;
}

double average_precision(const std::vector<DetectionSet> &frames,
                         double iou3d_threshold) {
  struct Ranked {
    double score;
    std::size_t frame;
    std::size_t pred;
    bool tp;
  };

  std::vector<Ranked> ranked;
  std::size_t total_gt = 0;
  for (std::size_t f = 0; f < frames.size(); ++f) {
    total_gt += frames[f].ground_truth.size();
    const MatchResult mr =
        match_frame(frames[f], MatchBy::IoU3D, iou3d_threshold);
    std::vector<bool> tp(frames[f].predictions.size(), false);
    for (const MatchPair &pair : mr.pairs) tp[pair.prediction] = true;
    for (std::size_t p = 0; p < frames[f].predictions.size(); ++p)
      ranked.push_back({frames[f].predictions[p].box.score, f, p, tp[p]});
  }
  if (total_gt == 0 || ranked.empty()) return 0.0;

  std::sort(ranked.begin(), ranked.end(), [](const Ranked &a, const Ranked &b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.frame != b.frame) return a.frame < b.frame;
    return a.pred < b.pred;
  });

  std::vector<double> precision(ranked.size());
  std::vector<double> recall(ranked.size());
  std::size_t tp = 0;
  for (std::size_t k = 0; k < ranked.size(); ++k) {
    if (ranked[k].tp) ++tp;
    precision[k] = static_cast<double>(tp) / static_cast<double>(k + 1);
    recall[k] = static_cast<double>(tp) / static_cast<double>(total_gt);
  }
  for (std::size_t k = ranked.size() - 1; k-- > 0;)
    precision[k] = std::max(precision[k], precision[k + 1]);

  double sum = 0.0;
  for (int i = 1; i <= 40; ++i) {
    const double want = static_cast<double>(i) / 40.0;
    const auto it = std::lower_bound(recall.begin(), recall.end(), want);
    if (it != recall.end())
      sum += precision[static_cast<std::size_t>(it - recall.begin())];
  }
  return 100.0 * sum / 40.0;
}

std::optional<double> mean_depth_error(
    const std::vector<DetectionSet> &frames) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const DetectionSet &frame : frames) {
    const MatchResult mr = match_frame(frame, MatchBy::IoU2D, 0.7);
    for (const MatchPair &pair : mr.pairs) {
      sum += frame.predictions[pair.prediction].box.z -
             frame.ground_truth[pair.gt].box.z;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

OracleSpec parse_mask(std::string_view mask) {
  OracleSpec spec;
  for (char c : mask) {
    switch (c) {
      case 'x': spec.x = true; break;
      case 'y': spec.y = true; break;
      case 'z': spec.z = true; break;
      case 'l': spec.l = true; break;
      case 'w': spec.w = true; break;
      case 'h': spec.h = true; break;
      case 't': spec.theta = true; break;
      default:
        fail(ErrorCode::UnknownMask,
             std::string("unknown oracle parameter '") + c + "'");
    }
  }
  return spec;
}

DetectionSet oracle_substitute(const DetectionSet &frame,
                               const std::vector<Detection> &gt,
                               const OracleSpec &spec) {
  DetectionSet out = frame;
  for (Detection &pred : out.predictions) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_gt = 0;
    for (std::size_t gi = 0; gi < gt.size(); ++gi) {
      const double d = center_distance(pred.box, gt[gi].box);
      if (d < best) {
        best = d;
        best_gt = gi;
      }
    }
    if (best > kOracleRadiusM) continue;
    const Box3D &truth = gt[best_gt].box;
    if (spec.x) pred.box.x = truth.x;
    if (spec.y) pred.box.y = truth.y;
    if (spec.z) pred.box.z = truth.z;
    if (spec.l) pred.box.l = truth.l;
    if (spec.w) pred.box.w = truth.w;
    if (spec.h) pred.box.h_box = truth.h_box;
    if (spec.theta) pred.box.theta = truth.theta;
  }
  return out;
}

EvalResult evaluate(const std::vector<DetectionSet> &frames) {
  EvalResult result;
  result.ap3d70 = average_precision(frames, 0.70);
  result.ap3d50 = average_precision(frames, 0.50);
  result.mde = mean_depth_error(frames);
  for (const DetectionSet &frame : frames) {
    const MatchResult mr = match_frame(frame, MatchBy::IoU2D, 0.7);
    result.matched += mr.pairs.size();
    result.missed += mr.unmatched_gt.size();
  }
  return result;
}

}  // namespace hrm3d
