#pragma once

#include <filesystem>

#include "hrm3d/config.hpp"

namespace hrm3d {

// Command entry points behind the CLI. Each writes its artifacts under
// config.out_dir, prints a summary table to stdout, and returns the process
// exit code: 0 for success, 2 when a requested verification fails. Usage
// and configuration problems are thrown as Error and map to exit code 1 in
// the CLI layer.

// Writes per-frame ground-truth and prediction label files plus a manifest
// recording the seed and config hash. frames = 0 writes the manifest only.
int cmd_simulate(const RunConfig &config);

// Evaluates prediction label files against ground-truth label files with
// matching frame ids. Errors: FrameMismatch listing the ids missing on
// either side.
int cmd_eval(const RunConfig &config, const std::filesystem::path &gt_dir,
             const std::filesystem::path &pred_dir);

// Runs the height-offset sweep, writes CSV, SVG, and the verification
// outcome, and returns 2 when a theorem check fails.
int cmd_sweep(const RunConfig &config);

// Runs the parameter-substitution breakdown and writes its CSV and table.
int cmd_oracle(const RunConfig &config);

}  // namespace hrm3d
