#include "hrm3d/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <limits>

#include "hrm3d/text.hpp"

namespace hrm3d {

namespace {

constexpr const char *kModelColors[] = {"#1f77b4", "#d62728", "#2ca02c",
                                        "#9467bd", "#ff7f0e"};

std::string mde_text(const std::optional<double> &mde) {
  return mde.has_value() ? format_fixed(*mde, 6) : std::string("NA");
}

void append_row(std::string &out, const char *fmt, ...)
    __attribute__((format(printf, 2, 3)));

void append_row(std::string &out, const char *fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  const int n = std::vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  out.append(buf, static_cast<std::size_t>(std::min<int>(
                      n, static_cast<int>(sizeof buf) - 1)));
}

std::string mask_label(const std::string &mask) {
  return mask.empty() ? std::string("none") : mask;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void include(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  bool degenerate() const { return !(hi > lo); }
};

}  // namespace

std::string eval_csv(const EvalResult &result) {
  std::string out = "ap3d70,ap3d50,mde,matched,missed\n";
  append_row(out, "%.4f,%.4f,%s,%zu,%zu\n", result.ap3d70, result.ap3d50,
             mde_text(result.mde).c_str(), result.matched, result.missed);
  return out;
}

std::string eval_table(const EvalResult &result) {
  std::string out;
  append_row(out, "%10s %10s %12s %8s %8s\n", "AP3D@0.70", "AP3D@0.50", "MDE",
             "matched", "missed");
  append_row(out, "%10.4f %10.4f %12s %8zu %8zu\n", result.ap3d70,
             result.ap3d50, mde_text(result.mde).c_str(), result.matched,
             result.missed);
  return out;
}

std::string sweep_csv(const TrendReport &report) {
  std::string out =
      "model,delta_h,ap3d70,ap3d50,mde,predicted_mde,matched,missed\n";
  for (const ModelTrend &trend : report.models)
    for (const TrendCell &cell : trend.cells)
      append_row(out, "%s,%.6f,%.4f,%.4f,%s,%.6f,%zu,%zu\n",
                 model_name(trend.id).c_str(), cell.delta_h, cell.eval.ap3d70,
                 cell.eval.ap3d50, mde_text(cell.eval.mde).c_str(),
                 cell.predicted_mde, cell.eval.matched, cell.eval.missed);
  return out;
}

std::string sweep_table(const TrendReport &report) {
  std::string out;
  append_row(out, "%-14s %8s %8s %8s %12s %12s\n", "model", "delta_h",
             "ap3d70", "ap3d50", "mde", "predicted");
  for (const ModelTrend &trend : report.models)
    for (const TrendCell &cell : trend.cells)
      append_row(out, "%-14s %+8.3f %8.2f %8.2f %12s %12.6f\n",
                 model_name(trend.id).c_str(), cell.delta_h, cell.eval.ap3d70,
                 cell.eval.ap3d50, mde_text(cell.eval.mde).c_str(),
                 cell.predicted_mde);
  out += "\n";
  for (const ModelTrend &trend : report.models)
    append_row(out, "%-14s slope %+10.4f m/m (closed form %+10.4f m/m)\n",
               model_name(trend.id).c_str(), trend.empirical_slope,
               trend.predicted_slope);
  return out;
}

std::string oracle_csv(const OracleReport &report) {
  std::string out = "mask,delta_h,ap3d70,ap3d50,mde,matched,missed\n";
  for (const OracleCell &cell : report.cells)
    append_row(out, "%s,%.6f,%.4f,%.4f,%s,%zu,%zu\n",
               mask_label(cell.mask).c_str(), cell.delta_h, cell.eval.ap3d70,
               cell.eval.ap3d50, mde_text(cell.eval.mde).c_str(),
               cell.eval.matched, cell.eval.missed);
  return out;
}

std::string oracle_table(const OracleReport &report) {
  std::string out;
  append_row(out, "%-10s %8s %8s %8s %12s\n", "mask", "delta_h", "ap3d70",
             "ap3d50", "mde");
  for (const OracleCell &cell : report.cells)
    append_row(out, "%-10s %+8.3f %8.2f %8.2f %12s\n",
               mask_label(cell.mask).c_str(), cell.delta_h, cell.eval.ap3d70,
               cell.eval.ap3d50, mde_text(cell.eval.mde).c_str());
  return out;
}

std::string verification_text(const VerificationOutcome &outcome) {
  std::string out =
      outcome.passed ? "verification: PASS\n" : "verification: FAIL\n";
  for (const std::string &msg : outcome.failures) out += "  - " + msg + "\n";
  return out;
}

std::string sweep_svg(const TrendReport &report) {
  constexpr double kWidth = 720.0;
  constexpr double kHeight = 480.0;
  constexpr double kLeft = 64.0;
  constexpr double kRight = 700.0;
  constexpr double kTop = 40.0;
  constexpr double kBottom = 420.0;

  Range xr;
  Range yr;
  for (double dh : report.grid) xr.include(dh);
  yr.include(0.0);
  for (const ModelTrend &trend : report.models)
    for (const TrendCell &cell : trend.cells) {
      if (cell.eval.mde.has_value()) yr.include(*cell.eval.mde);
      yr.include(cell.predicted_mde);
    }
  if (xr.degenerate()) {
    xr.lo -= 0.5;
    xr.hi += 0.5;
  }
  if (yr.degenerate()) {
    yr.lo -= 1.0;
    yr.hi += 1.0;
  }
  const double ypad = 0.05 * (yr.hi - yr.lo);
  yr.lo -= ypad;
  yr.hi += ypad;

  const auto px = [&](double dh) {
    return kLeft + (dh - xr.lo) / (xr.hi - xr.lo) * (kRight - kLeft);
  };
  const auto py = [&](double v) {
    return kBottom - (v - yr.lo) / (yr.hi - yr.lo) * (kBottom - kTop);
  };

  std::string out;
  append_row(out,
             "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" "
             "height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\">\n",
             kWidth, kHeight, kWidth, kHeight);
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  append_row(out,
             "<text x=\"%.1f\" y=\"20\" font-family=\"monospace\" "
             "font-size=\"14\" fill=\"black\">mean depth error vs "
             "camera-height offset</text>\n",
             kLeft);

  append_row(out,
             "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" "
             "stroke=\"black\" stroke-width=\"1\"/>\n",
             kLeft, kBottom, kRight, kBottom);
  append_row(out,
             "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" "
             "stroke=\"black\" stroke-width=\"1\"/>\n",
             kLeft, kTop, kLeft, kBottom);
  if (yr.lo < 0.0 && yr.hi > 0.0)
    append_row(out,
               "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" "
               "stroke=\"#999999\" stroke-width=\"1\" "
               "stroke-dasharray=\"4 4\"/>\n",
               kLeft, py(0.0), kRight, py(0.0));

  for (double dh : report.grid) {
    append_row(out,
               "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" "
               "stroke=\"black\" stroke-width=\"1\"/>\n",
               px(dh), kBottom, px(dh), kBottom + 6.0);
    append_row(out,
               "<text x=\"%.2f\" y=\"%.2f\" font-family=\"monospace\" "
               "font-size=\"12\" fill=\"black\" "
               "text-anchor=\"middle\">%.2f</text>\n",
               px(dh), kBottom + 20.0, dh);
  }
  for (int i = 0; i <= 4; ++i) {
    const double v = yr.lo + (yr.hi - yr.lo) * i / 4.0;
    append_row(out,
               "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" "
               "stroke=\"black\" stroke-width=\"1\"/>\n",
               kLeft - 6.0, py(v), kLeft, py(v));
    append_row(out,
               "<text x=\"%.2f\" y=\"%.2f\" font-family=\"monospace\" "
               "font-size=\"12\" fill=\"black\" "
               "text-anchor=\"end\">%.2f</text>\n",
               kLeft - 10.0, py(v) + 4.0, v);
  }
  append_row(out,
             "<text x=\"%.2f\" y=\"%.2f\" font-family=\"monospace\" "
             "font-size=\"12\" fill=\"black\" "
             "text-anchor=\"middle\">height offset (m)</text>\n",
             0.5 * (kLeft + kRight), kBottom + 40.0);

  for (std::size_t m = 0; m < report.models.size(); ++m) {
    const ModelTrend &trend = report.models[m];
    const char *color =
        kModelColors[m % (sizeof kModelColors / sizeof kModelColors[0])];

    std::string emp_points;
    std::string pred_points;
    for (const TrendCell &cell : trend.cells) {
      if (cell.eval.mde.has_value())
        append_row(emp_points, "%.2f,%.2f ", px(cell.delta_h),
                   py(*cell.eval.mde));
      append_row(pred_points, "%.2f,%.2f ", px(cell.delta_h),
                 py(cell.predicted_mde));
    }
    if (!emp_points.empty())
      append_row(out,
                 "<polyline points=\"%s\" fill=\"none\" stroke=\"%s\" "
                 "stroke-width=\"2\"/>\n",
                 emp_points.c_str(), color);
    if (!pred_points.empty())
      append_row(out,
                 "<polyline points=\"%s\" fill=\"none\" stroke=\"%s\" "
                 "stroke-width=\"1\" stroke-dasharray=\"6 3\"/>\n",
                 pred_points.c_str(), color);

    const double ly = kTop + 16.0 * static_cast<double>(m);
    append_row(out,
               "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" "
               "stroke=\"%s\" stroke-width=\"2\"/>\n",
               kLeft + 10.0, ly, kLeft + 34.0, ly, color);
    append_row(out,
               "<text x=\"%.2f\" y=\"%.2f\" font-family=\"monospace\" "
               "font-size=\"12\" fill=\"black\">%s</text>\n",
               kLeft + 40.0, ly + 4.0, model_name(trend.id).c_str());
  }

  out += "</svg>\n";
  return out;
}

}  // namespace hrm3d
