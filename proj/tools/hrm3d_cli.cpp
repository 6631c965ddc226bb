#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <deque>
#include <memory>
#include <string>
#include <vector>

#include "hrm3d/hrm3d.h"

namespace {

struct ConfigDeleter {
  void operator()(hrm3d_config *config) const { hrm3d_config_destroy(config); }
};
using ConfigHandle = std::unique_ptr<hrm3d_config, ConfigDeleter>;

struct FlagBinding {
  CLI::Option *opt;
  const char *section;
  const char *key;
  const std::string *value;
};

struct Subcommand {
  CLI::App *cmd = nullptr;
  std::string config_file;
  std::deque<std::string> values;
  std::vector<FlagBinding> bindings;
};

void bind(Subcommand &sub, const char *flag, const char *section,
          const char *key, const char *help) {
  sub.values.emplace_back();
  CLI::Option *opt = sub.cmd->add_option(flag, sub.values.back(), help);
  sub.bindings.push_back({opt, section, key, &sub.values.back()});
}

void add_common_flags(Subcommand &sub) {
  sub.cmd->add_option("--config", sub.config_file,
                      "config file applied before flag overrides");
  bind(sub, "--seed", "run", "seed",
       "master seed (default 0; HRM3D_SEED env is the fallback when neither "
       "flag nor file sets one)");
  bind(sub, "--out", "run", "out", "output directory (default out)");
  bind(sub, "--grid", "run", "grid",
       "comma-separated camera-height offsets in meters (default "
       "-0.70,-0.35,0,0.38,0.76)");
  bind(sub, "--models", "run", "models",
       "comma-separated depth models: source, ground, fused, compensated, "
       "compensated++ (default all five)");
  bind(sub, "--masks", "run", "masks",
       "comma-separated substitution masks over x,y,z,l,w,h,t; 'none' is the "
       "no-substitution baseline (default none,x,y,z,lwh,xyz,xyzlwht)");
  bind(sub, "--frames", "run", "frames",
       "frames per scene family (default 200)");
  bind(sub, "--sigma", "run", "sigma",
       "depth noise sigma in meters (default 0.5)");
  bind(sub, "--relu", "run", "relu",
       "clamp the ground-depth numerator at zero: on|off (default on)");
  bind(sub, "--alpha-mode", "run", "alpha_mode",
       "bottom-center formulation: product|sum (default product)");
  bind(sub, "--fusion-weight", "run", "fusion_weight",
       "regressed-model weight in the fused average (default 0.5)");
  bind(sub, "--z-assumed", "run", "z_assumed",
       "assumed depth of the constant compensation term (default 50)");
}

int report_failure(hrm3d_status status) {
  std::fprintf(stderr, "error: %s [%s]\n", hrm3d_last_error(),
               hrm3d_status_name(status));
  return 1;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{
      "deterministic simulator and evaluator for camera-height-robust "
      "monocular 3D detection"};
  app.require_subcommand(1);

  Subcommand simulate;
  simulate.cmd = app.add_subcommand(
      "simulate",
      "write per-frame ground-truth and prediction label files plus a "
      "manifest");
  add_common_flags(simulate);
  bind(simulate, "--delta-h", "run", "delta_h",
       "camera-height offset at observation time in meters (default 0)");
  bind(simulate, "--model", "run", "model",
       "depth model producing the predictions (default source)");

  Subcommand evaluate;
  evaluate.cmd = app.add_subcommand(
      "eval",
      "score prediction label files against ground-truth label files");
  std::string gt_dir;
  std::string pred_dir;
  evaluate.cmd->add_option("gt_dir", gt_dir, "directory of ground-truth label files")
      ->required();
  evaluate.cmd
      ->add_option("pred_dir", pred_dir, "directory of prediction label files")
      ->required();
  add_common_flags(evaluate);

  Subcommand sweep;
  sweep.cmd = app.add_subcommand(
      "sweep",
      "run the height-offset sweep, verify the error-trend theory, and write "
      "CSV/SVG reports (exit 2 when verification fails)");
  add_common_flags(sweep);

  Subcommand oracle;
  oracle.cmd = app.add_subcommand(
      "oracle",
      "attribute detection error to box parameters by substituting "
      "ground-truth values per mask");
  add_common_flags(oracle);
  bind(oracle, "--model", "run", "model",
       "depth model producing the predictions (default source)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return 1;
  }

  Subcommand *active = nullptr;
  for (Subcommand *sub : {&simulate, &evaluate, &sweep, &oracle})
    if (sub->cmd->parsed()) active = sub;
  if (active == nullptr) {
    std::fprintf(stderr, "error: no command selected\n");
    return 1;
  }

  hrm3d_config *raw = nullptr;
  if (const hrm3d_status st = hrm3d_config_create(&raw); st != HRM3D_OK)
    return report_failure(st);
  ConfigHandle config(raw);

  if (const char *env = std::getenv("HRM3D_SEED"); env != nullptr && *env != '\0')
    if (const hrm3d_status st = hrm3d_config_set(config.get(), "run", "seed", env);
        st != HRM3D_OK)
      return report_failure(st);
  if (!active->config_file.empty())
    if (const hrm3d_status st =
            hrm3d_config_load_file(config.get(), active->config_file.c_str());
        st != HRM3D_OK)
      return report_failure(st);
  for (const FlagBinding &binding : active->bindings)
    if (binding.opt->count() > 0)
      if (const hrm3d_status st =
              hrm3d_config_set(config.get(), binding.section, binding.key,
                               binding.value->c_str());
          st != HRM3D_OK)
        return report_failure(st);

  int exit_code = 0;
  hrm3d_status status = HRM3D_OK;
  if (active == &simulate)
    status = hrm3d_cmd_simulate(config.get(), &exit_code);
  else if (active == &evaluate)
    status = hrm3d_cmd_eval(config.get(), gt_dir.c_str(), pred_dir.c_str(),
                            &exit_code);
  else if (active == &sweep)
    status = hrm3d_cmd_sweep(config.get(), &exit_code);
  else
    status = hrm3d_cmd_oracle(config.get(), &exit_code);

  if (status != HRM3D_OK) return report_failure(status);
  return exit_code;
}
