#ifndef HRM3D_H
#define HRM3D_H

/* C interface to the height-robust monocular 3D toolkit. Every entry point
 * returns a status code; on failure hrm3d_last_error() describes the
 * problem for the calling thread. */

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hrm3d_status {
  HRM3D_OK = 0,
  HRM3D_ERR_INVALID_ARGUMENT = 1,
  HRM3D_ERR_BEHIND_CAMERA = 2,
  HRM3D_ERR_MISSING_DEPTH = 3,
  HRM3D_ERR_HORIZON_DEGENERATE = 4,
  HRM3D_ERR_NOT_A_SIMPLEX = 5,
  HRM3D_ERR_DEGENERATE_FIT = 6,
  HRM3D_ERR_EMPTY_CONFIG_RANGE = 7,
  HRM3D_ERR_CONFIG_INVALID = 8,
  HRM3D_ERR_IO_FAILURE = 9,
  HRM3D_ERR_FRAME_MISMATCH = 10,
  HRM3D_ERR_UNKNOWN_MASK = 11,
  HRM3D_ERR_VERIFICATION_FAILED = 12,
  HRM3D_ERR_UNKNOWN = 13
} hrm3d_status;

/* Message for the most recent failure on this thread; empty string when the
 * last call succeeded. The pointer stays valid until the next call on the
 * same thread. */
const char *hrm3d_last_error(void);

/* Stable identifier such as "config-invalid" for logging. */
const char *hrm3d_status_name(hrm3d_status status);

/* Depth of the ground-plane point seen at image row v for a level camera
 * with focal length f, principal row v0, and mounting height h. */
hrm3d_status hrm3d_ground_depth(double v, double f, double v0, double h,
                                double *out_depth);

/* Same lookup for a camera pitched by `pitch` radians. */
hrm3d_status hrm3d_ground_depth_pitched(double v, double f, double v0,
                                        double h, double pitch,
                                        double *out_depth);

/* Run configuration handle. Created with defaults; a config file and then
 * individual overrides may be layered on top, later writes winning. */
typedef struct hrm3d_config hrm3d_config;

hrm3d_status hrm3d_config_create(hrm3d_config **out_config);
void hrm3d_config_destroy(hrm3d_config *config);

/* Applies the entries of a flat key-value config file on top of the current
 * values. */
hrm3d_status hrm3d_config_load_file(hrm3d_config *config, const char *path);

/* Sets one entry, e.g. ("run", "seed", "7") or ("scene", "pitch", "0.3").
 * Spellings match the config file schema exactly. */
hrm3d_status hrm3d_config_set(hrm3d_config *config, const char *section,
                              const char *key, const char *value);

/* Canonical config text for the current values. The buffer is owned by the
 * handle and stays valid until the next call on it. */
hrm3d_status hrm3d_config_text(hrm3d_config *config, const char **out_text);

/* Commands. Artifacts land in the configured output directory, a summary is
 * printed to stdout, and *out_exit receives the process exit code: 0 for
 * success, 2 when a requested verification fails. Configuration and I/O
 * problems come back as a status instead (exit code 1 territory). */
hrm3d_status hrm3d_cmd_simulate(const hrm3d_config *config, int *out_exit);
hrm3d_status hrm3d_cmd_eval(const hrm3d_config *config, const char *gt_dir,
                            const char *pred_dir, int *out_exit);
hrm3d_status hrm3d_cmd_sweep(const hrm3d_config *config, int *out_exit);
hrm3d_status hrm3d_cmd_oracle(const hrm3d_config *config, int *out_exit);

#ifdef __cplusplus
}
#endif

#endif /* HRM3D_H */
