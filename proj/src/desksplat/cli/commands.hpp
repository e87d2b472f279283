#pragma once

#include <string>

#include "desksplat/train/trainer.hpp"

namespace desksplat {

// Exit codes shared by every subcommand.
constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;       // unexpected failures
constexpr int kExitConfig = 2;      // invalid parameters / spec / flags
constexpr int kExitData = 3;        // unreadable or unwritable artifacts
constexpr int kExitNumeric = 4;     // optimization diverged

struct TrainCliOptions {
  std::string dataset_dir;
  std::string out_dir;
  std::string config_file;     // optional JSON with TrainConfig overrides
  std::string from_manifest;   // re-run a previous run's resolved config
  int iterations = -1;         // -1: keep the config/default value
  long long seed = -1;         // -1: keep
  int sh_degree = -1;          // -1: keep
  int threads = -1;            // -1: keep
  bool no_texture_aware = false;
  bool no_vdrc = false;
  bool no_normal_guide = false;
};

struct RenderCliOptions {
  std::string checkpoint;      // prefix or .ply path of a saved checkpoint
  std::string dataset_dir;     // provides the camera
  std::string view;            // image name or numeric index (default: 0)
  std::string out_png;
  std::string out_depth_pfm;   // optional: blend-weighted depth
  std::string out_weight_png;  // optional: accumulated blend weight (1 - T)
  int sh_degree = kMaxShDegree;
  int threads = 1;
};

struct EvalCliOptions {
  std::string checkpoint;
  std::string dataset_dir;
  std::string split = "heldout";  // heldout | train | all
  std::string out_csv;            // optional copy of the table
  double surface_tolerance = -1;  // <0: 5% of the scene extent
  int sh_degree = kMaxShDegree;
  int threads = 1;
};

// Each command returns one of the exit codes above and reports errors on
// stderr. They are regular functions so tests can call them in-process.
int cmd_synth(const std::string& spec_file, const std::string& out_dir);
int cmd_train(const TrainCliOptions& opts);
int cmd_render(const RenderCliOptions& opts);
int cmd_eval(const EvalCliOptions& opts);

}  // namespace desksplat
