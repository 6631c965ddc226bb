#include "hrm3d/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "hrm3d/text.hpp"

namespace hrm3d {

namespace {

[[noreturn]] void bad_value(std::string_view key, std::string_view value,
                            const char *expected) {
  fail(ErrorCode::ConfigInvalid, "key '" + std::string(key) + "': expected " +
                                     expected + ", got '" +
                                     std::string(value) + "'");
}

double number_value(std::string_view key, std::string_view value) {
  double out = 0.0;
  if (!parse_double(trim(value), out)) bad_value(key, value, "a number");
  return out;
}

int int_value(std::string_view key, std::string_view value) {
  long long out = 0;
  if (!parse_int(trim(value), out)) bad_value(key, value, "an integer");
  return static_cast<int>(out);
}

std::uint64_t parse_seed(std::string_view key, std::string_view value) {
  const std::string_view t = trim(value);
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (ec != std::errc() || ptr != t.data() + t.size())
    bad_value(key, value, "an unsigned integer");
  return out;
}

bool parse_switch(std::string_view key, std::string_view value) {
  const std::string_view t = trim(value);
  if (t == "on" || t == "true" || t == "1") return true;
  if (t == "off" || t == "false" || t == "0") return false;
  bad_value(key, value, "on or off");
}

std::vector<std::string_view> split_list(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    out.push_back(trim(text.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::array<double, 3> parse_triple(std::string_view key,
                                   std::string_view value) {
  const std::vector<double> values = parse_double_list(value);
  if (values.size() != 3) bad_value(key, value, "three comma-separated numbers");
  return {values[0], values[1], values[2]};
}

void apply_scene_entry(SceneConfig &scene, std::string_view key,
                       std::string_view value) {
  if (key == "camera_height")
    scene.camera.extr.mounting_height = number_value(key, value);
  else if (key == "pitch")
    scene.camera.extr.pitch = number_value(key, value);
  else if (key == "focal")
    scene.camera.intr.f = number_value(key, value);
  else if (key == "u0")
    scene.camera.intr.u0 = number_value(key, value);
  else if (key == "v0")
    scene.camera.intr.v0 = number_value(key, value);
  else if (key == "image_width")
    scene.camera.intr.image_width = number_value(key, value);
  else if (key == "image_height")
    scene.camera.intr.image_height = number_value(key, value);
  else if (key == "min_boxes")
    scene.min_boxes = int_value(key, value);
  else if (key == "max_boxes")
    scene.max_boxes = int_value(key, value);
  else if (key == "z_near")
    scene.z_near = number_value(key, value);
  else if (key == "z_far")
    scene.z_far = number_value(key, value);
  else if (key == "x_min")
    scene.x_min = number_value(key, value);
  else if (key == "x_max")
    scene.x_max = number_value(key, value);
  else if (key == "x_fov_proportional")
    scene.x_fov_proportional = parse_switch(key, value);
  else if (key == "dim_mean")
    scene.dim_mean = parse_triple(key, value);
  else if (key == "dim_sigma")
    scene.dim_sigma = parse_triple(key, value);
  else
    fail(ErrorCode::ConfigInvalid,
         "unknown key '" + std::string(key) + "' in [scene]");
}

void apply_run_entry(RunConfig &config, std::string_view key,
                     std::string_view value) {
  if (key == "seed")
    config.seed = parse_seed(key, value);
  else if (key == "frames")
    config.frames = int_value(key, value);
  else if (key == "sigma")
    config.sigma = number_value(key, value);
  else if (key == "relu")
    config.relu_guard = parse_switch(key, value);
  else if (key == "alpha_mode") {
    const std::string_view t = trim(value);
    if (t == "product")
      config.alpha_formulation = AlphaFormulation::Product;
    else if (t == "sum")
      config.alpha_formulation = AlphaFormulation::Sum;
    else
      bad_value(key, value, "product or sum");
  } else if (key == "fusion_weight")
    config.fusion_weight = number_value(key, value);
  else if (key == "z_assumed")
    config.z_assumed = number_value(key, value);
  else if (key == "grid")
    config.grid = parse_double_list(value);
  else if (key == "models")
    config.models = parse_model_list(value);
  else if (key == "masks")
    config.masks = parse_mask_list(value);
  else if (key == "out")
    config.out_dir = std::string(trim(value));
  else if (key == "delta_h")
    config.delta_h = number_value(key, value);
  else if (key == "model")
    config.model = parse_model(trim(value));
  else
    fail(ErrorCode::ConfigInvalid,
         "unknown key '" + std::string(key) + "' in [run]");
}

}  // namespace

void apply_config_entry(RunConfig &config, std::string_view section,
                        std::string_view key, std::string_view value) {
  if (section == "scene")
    apply_scene_entry(config.scene, key, value);
  else if (section == "run")
    apply_run_entry(config, key, value);
  else
    fail(ErrorCode::ConfigInvalid,
         "unknown section '" + std::string(section) + "'");
}

void apply_config_text(RunConfig &config, std::string_view text,
                       std::string_view origin) {
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    const std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    try {
      if (line.front() == '[') {
        if (line.back() != ']')
          fail(ErrorCode::ConfigInvalid, "unterminated section header");
        section = std::string(trim(line.substr(1, line.size() - 2)));
        if (section.empty())
          fail(ErrorCode::ConfigInvalid, "empty section name");
        continue;
      }
      const std::size_t eq = line.find('=');
      if (eq == std::string_view::npos)
        fail(ErrorCode::ConfigInvalid, "expected 'key = value'");
      if (section.empty())
        fail(ErrorCode::ConfigInvalid, "key before any [section] header");
      apply_config_entry(config, section, trim(line.substr(0, eq)),
                         trim(line.substr(eq + 1)));
    } catch (const Error &e) {
      fail(e.code(), std::string(origin) + ":" + std::to_string(line_no) +
                         ": " + e.what());
    }
  }
}

void apply_config_file(RunConfig &config, const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    fail(ErrorCode::IoFailure, "cannot open '" + path.string() + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  apply_config_text(config, buffer.str(), path.string());
}

RunConfig parse_config_text(std::string_view text, std::string_view origin) {
  RunConfig config;
  apply_config_text(config, text, origin);
  return config;
}

RunConfig load_config_file(const std::filesystem::path &path) {
  RunConfig config;
  apply_config_file(config, path);
  return config;
}

std::string canonical_config(const RunConfig &config) {
  const SceneConfig &s = config.scene;
  std::string out = "[scene]\n";
  out += "camera_height = " + format_double(s.camera.extr.mounting_height) + "\n";
  out += "pitch = " + format_double(s.camera.extr.pitch) + "\n";
  out += "focal = " + format_double(s.camera.intr.f) + "\n";
  out += "u0 = " + format_double(s.camera.intr.u0) + "\n";
  out += "v0 = " + format_double(s.camera.intr.v0) + "\n";
  out += "image_width = " + format_double(s.camera.intr.image_width) + "\n";
  out += "image_height = " + format_double(s.camera.intr.image_height) + "\n";
  out += "min_boxes = " + std::to_string(s.min_boxes) + "\n";
  out += "max_boxes = " + std::to_string(s.max_boxes) + "\n";
  out += "z_near = " + format_double(s.z_near) + "\n";
  out += "z_far = " + format_double(s.z_far) + "\n";
  out += "x_min = " + format_double(s.x_min) + "\n";
  out += "x_max = " + format_double(s.x_max) + "\n";
  out += std::string("x_fov_proportional = ") +
         (s.x_fov_proportional ? "on" : "off") + "\n";
  out += "dim_mean = " + format_double(s.dim_mean[0]) + ", " +
         format_double(s.dim_mean[1]) + ", " + format_double(s.dim_mean[2]) +
         "\n";
  out += "dim_sigma = " + format_double(s.dim_sigma[0]) + ", " +
         format_double(s.dim_sigma[1]) + ", " + format_double(s.dim_sigma[2]) +
         "\n";

  out += "\n[run]\n";
  out += "seed = " + std::to_string(config.seed) + "\n";
  out += "frames = " + std::to_string(config.frames) + "\n";
  out += "sigma = " + format_double(config.sigma) + "\n";
  out += std::string("relu = ") + (config.relu_guard ? "on" : "off") + "\n";
  out += std::string("alpha_mode = ") +
         (config.alpha_formulation == AlphaFormulation::Product ? "product"
                                                                : "sum") +
         "\n";
  out += "fusion_weight = " + format_double(config.fusion_weight) + "\n";
  out += "z_assumed = " + format_double(config.z_assumed) + "\n";
  out += "grid = ";
  for (std::size_t i = 0; i < config.grid.size(); ++i)
    out += (i == 0 ? "" : ", ") + format_double(config.grid[i]);
  out += "\nmodels = ";
  for (std::size_t i = 0; i < config.models.size(); ++i)
    out += (i == 0 ? "" : ", ") + model_name(config.models[i]);
  out += "\nmasks = ";
  for (std::size_t i = 0; i < config.masks.size(); ++i)
    out += (i == 0 ? std::string() : std::string(", ")) +
           (config.masks[i].empty() ? "none" : config.masks[i]);
  out += "\nout = " + config.out_dir + "\n";
  out += "delta_h = " + format_double(config.delta_h) + "\n";
  out += "model = " + model_name(config.model) + "\n";
  return out;
}

std::uint64_t config_hash(const RunConfig &config) {
  const std::string text = canonical_config(config);
  std::uint64_t hash = 14695981039346656037ULL;
  for (const char c : text) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 1099511628211ULL;
  }
  return hash;
}

SweepConfig sweep_config(const RunConfig &config) {
  SweepConfig out;
  out.scene = config.scene;
  out.grid = config.grid;
  out.train_frames = config.frames;
  out.eval_frames = config.frames;
  out.seed = config.seed;
  out.models = config.models;
  out.alpha_formulation = config.alpha_formulation;
  out.fusion_weight = config.fusion_weight;
  out.z_assumed = config.z_assumed;
  out.noise.sigma = config.sigma;
  out.relu_guard = config.relu_guard;
  return out;
}

OracleConfig oracle_config(const RunConfig &config) {
  OracleConfig out;
  out.train_scene = config.scene;
  out.eval_scene = oracle_eval_family();
  out.eval_scene.camera = config.scene.camera;
  out.grid = config.grid;
  out.masks = config.masks;
  out.train_frames = config.frames;
  out.eval_frames = config.frames;
  out.seed = config.seed;
  out.model = config.model;
  out.alpha_formulation = config.alpha_formulation;
  out.fusion_weight = config.fusion_weight;
  out.z_assumed = config.z_assumed;
  out.noise.sigma = config.sigma;
  out.relu_guard = config.relu_guard;
  return out;
}

std::vector<double> parse_double_list(std::string_view text) {
  std::vector<double> out;
  for (const std::string_view token : split_list(text)) {
    if (token.empty())
      fail(ErrorCode::ConfigInvalid,
           "empty entry in number list '" + std::string(text) + "'");
    out.push_back(number_value("list entry", token));
  }
  return out;
}

std::vector<ModelId> parse_model_list(std::string_view text) {
  std::vector<ModelId> out;
  for (const std::string_view token : split_list(text))
    out.push_back(parse_model(token));
  return out;
}

std::vector<std::string> parse_mask_list(std::string_view text) {
  std::vector<std::string> out;
  for (const std::string_view token : split_list(text))
    out.push_back(token == "none" ? std::string() : std::string(token));
  return out;
}

}  // namespace hrm3d
