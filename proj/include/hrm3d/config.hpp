#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "hrm3d/trend.hpp"

namespace hrm3d {

// Everything a command needs, collected from defaults, an optional config
// file, and flag overrides applied in that order.
struct RunConfig {
  SceneConfig scene;
  std::vector<double> grid = {-0.70, -0.35, 0.0, 0.38, 0.76};
  std::vector<ModelId> models = {ModelId::Source, ModelId::Ground,
                                 ModelId::Fused, ModelId::Compensated,
                                 ModelId::CompensatedPlus};
  std::vector<std::string> masks = {"", "x", "y", "z", "lwh", "xyz",
                                    "xyzlwht"};
  int frames = 200;
  double sigma = 0.5;
  bool relu_guard = true;
  AlphaFormulation alpha_formulation = AlphaFormulation::Product;
  double fusion_weight = 0.5;
  double z_assumed = 50.0;
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  double delta_h = 0.0;
  ModelId model = ModelId::Source;
};

// Applies one "[section] key = value" entry. Sections are "scene" and "run";
// unknown sections, keys, or unparseable values raise ConfigInvalid naming
// the entry. The same routine backs the file parser and flag overrides, so
// both accept identical spellings.
void apply_config_entry(RunConfig &config, std::string_view section,
                        std::string_view key, std::string_view value);

// Flat key-value text with [section] headers, '#' comments, and blank
// lines. Entries override whatever config already holds, leaving unmentioned
// keys alone, which is what lets defaults < file < flags layer cleanly.
// Errors carry an "origin:line:" prefix.
void apply_config_text(RunConfig &config, std::string_view text,
                       std::string_view origin);

void apply_config_file(RunConfig &config, const std::filesystem::path &path);

RunConfig load_config_file(const std::filesystem::path &path);

RunConfig parse_config_text(std::string_view text, std::string_view origin);

// Full configuration in file syntax with every key in a fixed order, so it
// reparses to an identical RunConfig and hashes stably for manifests.
std::string canonical_config(const RunConfig &config);

std::uint64_t config_hash(const RunConfig &config);

SweepConfig sweep_config(const RunConfig &config);

OracleConfig oracle_config(const RunConfig &config);

// Comma-separated helpers shared with the flag layer. Model lists use the
// model_name spellings; mask lists accept "none" for the baseline row.
std::vector<double> parse_double_list(std::string_view text);
std::vector<ModelId> parse_model_list(std::string_view text);
std::vector<std::string> parse_mask_list(std::string_view text);

}  // namespace hrm3d
