#include "hrm3d/hrm3d.h"

#include <exception>
#include <string>

#include "hrm3d/geometry.hpp"
#include "hrm3d/runner.hpp"

struct hrm3d_config {
  hrm3d::RunConfig cfg;
  std::string text;
};

namespace {

thread_local std::string g_last_error;

hrm3d_status map_code(hrm3d::ErrorCode code) {
  switch (code) {
    case hrm3d::ErrorCode::InvalidArgument:
      return HRM3D_ERR_INVALID_ARGUMENT;
    case hrm3d::ErrorCode::BehindCamera:
      return HRM3D_ERR_BEHIND_CAMERA;
    case hrm3d::ErrorCode::MissingDepth:
      return HRM3D_ERR_MISSING_DEPTH;
    case hrm3d::ErrorCode::HorizonDegenerate:
      return HRM3D_ERR_HORIZON_DEGENERATE;
    case hrm3d::ErrorCode::NotASimplex:
      return HRM3D_ERR_NOT_A_SIMPLEX;
    case hrm3d::ErrorCode::DegenerateFit:
      return HRM3D_ERR_DEGENERATE_FIT;
    case hrm3d::ErrorCode::EmptyConfigRange:
      return HRM3D_ERR_EMPTY_CONFIG_RANGE;
    case hrm3d::ErrorCode::ConfigInvalid:
      return HRM3D_ERR_CONFIG_INVALID;
    case hrm3d::ErrorCode::IoFailure:
      return HRM3D_ERR_IO_FAILURE;
    case hrm3d::ErrorCode::FrameMismatch:
      return HRM3D_ERR_FRAME_MISMATCH;
    case hrm3d::ErrorCode::UnknownMask:
      return HRM3D_ERR_UNKNOWN_MASK;
    case hrm3d::ErrorCode::VerificationFailed:
      return HRM3D_ERR_VERIFICATION_FAILED;
  }
  return HRM3D_ERR_UNKNOWN;
}

template <typename Fn>
hrm3d_status wrap(Fn &&fn) noexcept {
  try {
    fn();
    g_last_error.clear();
    return HRM3D_OK;
  } catch (const hrm3d::Error &e) {
    g_last_error = e.what();
    return map_code(e.code());
  } catch (const std::exception &e) {
    g_last_error = e.what();
    return HRM3D_ERR_UNKNOWN;
  } catch (...) {
    g_last_error = "unknown failure";
    return HRM3D_ERR_UNKNOWN;
  }
}

hrm3d_status null_argument(const char *what) {
  g_last_error = std::string(what) + " must not be null";
  return HRM3D_ERR_INVALID_ARGUMENT;
}

hrm3d::Camera level_camera(double f, double v0, double h) {
  hrm3d::Camera cam;
  cam.intr.f = f;
  cam.intr.v0 = v0;
  cam.extr.mounting_height = h;
  return cam;
}

}  // namespace

extern "C" {

const char *hrm3d_last_error(void) { return g_last_error.c_str(); }

const char *hrm3d_status_name(hrm3d_status status) {
  switch (status) {
    case HRM3D_OK: return "ok";
    case HRM3D_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case HRM3D_ERR_BEHIND_CAMERA: return "behind-camera";
    case HRM3D_ERR_MISSING_DEPTH: return "missing-depth";
    case HRM3D_ERR_HORIZON_DEGENERATE: return "horizon-degenerate";
    case HRM3D_ERR_NOT_A_SIMPLEX: return "not-a-simplex";
    case HRM3D_ERR_DEGENERATE_FIT: return "degenerate-fit";
    case HRM3D_ERR_EMPTY_CONFIG_RANGE: return "empty-config-range";
    case HRM3D_ERR_CONFIG_INVALID: return "config-invalid";
    case HRM3D_ERR_IO_FAILURE: return "io-failure";
    case HRM3D_ERR_FRAME_MISMATCH: return "frame-mismatch";
    case HRM3D_ERR_UNKNOWN_MASK: return "unknown-mask";
    case HRM3D_ERR_VERIFICATION_FAILED: return "verification-failed";
    case HRM3D_ERR_UNKNOWN: return "unknown";
  }
  return "unknown";
}

hrm3d_status hrm3d_ground_depth(double v, double f, double v0, double h,
                                double *out_depth) {
  if (out_depth == nullptr) return null_argument("out_depth");
  return wrap([&] {
    const hrm3d::Camera cam = level_camera(f, v0, h);
    hrm3d::GroundPlane plane;
    plane.offset = h;
    *out_depth = hrm3d::ground_depth({cam.intr.u0, v, 0.0}, cam, plane);
  });
}

hrm3d_status hrm3d_ground_depth_pitched(double v, double f, double v0,
                                        double h, double pitch,
                                        double *out_depth) {
  if (out_depth == nullptr) return null_argument("out_depth");
  return wrap([&] {
    hrm3d::Camera cam = level_camera(f, v0, h);
    cam.extr.pitch = pitch;
    *out_depth = hrm3d::ground_depth_pitched({cam.intr.u0, v, 0.0}, cam);
  });
}

hrm3d_status hrm3d_config_create(hrm3d_config **out_config) {
  if (out_config == nullptr) return null_argument("out_config");
  return wrap([&] { *out_config = new hrm3d_config(); });
}

void hrm3d_config_destroy(hrm3d_config *config) { delete config; }

hrm3d_status hrm3d_config_load_file(hrm3d_config *config, const char *path) {
  if (config == nullptr) return null_argument("config");
  if (path == nullptr) return null_argument("path");
  return wrap([&] { hrm3d::apply_config_file(config->cfg, path); });
}

hrm3d_status hrm3d_config_set(hrm3d_config *config, const char *section,
                              const char *key, const char *value) {
  if (config == nullptr) return null_argument("config");
  if (section == nullptr || key == nullptr || value == nullptr)
    return null_argument("section/key/value");
  return wrap(
      [&] { hrm3d::apply_config_entry(config->cfg, section, key, value); });
}

hrm3d_status hrm3d_config_text(hrm3d_config *config, const char **out_text) {
  if (config == nullptr) return null_argument("config");
  if (out_text == nullptr) return null_argument("out_text");
  return wrap([&] {
    config->text = hrm3d::canonical_config(config->cfg);
    *out_text = config->text.c_str();
  });
}

hrm3d_status hrm3d_cmd_simulate(const hrm3d_config *config, int *out_exit) {
  if (config == nullptr) return null_argument("config");
  if (out_exit == nullptr) return null_argument("out_exit");
  return wrap([&] { *out_exit = hrm3d::cmd_simulate(config->cfg); });
}

hrm3d_status hrm3d_cmd_eval(const hrm3d_config *config, const char *gt_dir,
                            const char *pred_dir, int *out_exit) {
  if (config == nullptr) return null_argument("config");
  if (gt_dir == nullptr || pred_dir == nullptr)
    return null_argument("gt_dir/pred_dir");
  if (out_exit == nullptr) return null_argument("out_exit");
  return wrap(
      [&] { *out_exit = hrm3d::cmd_eval(config->cfg, gt_dir, pred_dir); });
}

hrm3d_status hrm3d_cmd_sweep(const hrm3d_config *config, int *out_exit) {
  if (config == nullptr) return null_argument("config");
  if (out_exit == nullptr) return null_argument("out_exit");
  return wrap([&] { *out_exit = hrm3d::cmd_sweep(config->cfg); });
}

hrm3d_status hrm3d_cmd_oracle(const hrm3d_config *config, int *out_exit) {
  if (config == nullptr) return null_argument("config");
  if (out_exit == nullptr) return null_argument("out_exit");
  return wrap([&] { *out_exit = hrm3d::cmd_oracle(config->cfg); });
}

}  // extern "C"
