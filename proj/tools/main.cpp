#include <CLI11.hpp>
#include <string>

#include "desksplat/cli/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"desksplat: desk-scale Gaussian-splatting reconstruction"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "desksplat 1.0.0");

  // --- synth -------------------------------------------------------------
  std::string synth_spec, synth_out;
  CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic benchmark dataset");
  synth->add_option("spec", synth_spec, "Scene description JSON")->required();
  synth->add_option("out", synth_out, "Output dataset directory")->required();

  // --- train -------------------------------------------------------------
  desksplat::TrainCliOptions tr;
  CLI::App* train = app.add_subcommand("train", "Optimize a splat scene from a dataset");
  train->add_option("--dataset", tr.dataset_dir, "Dataset directory");
  train->add_option("--out", tr.out_dir, "Output directory for checkpoints and metrics");
  train->add_option("--config", tr.config_file, "JSON file with config overrides");
  train->add_option("--from-manifest", tr.from_manifest,
                    "Reproduce a previous run from its manifest.json");
  train->add_option("--iterations", tr.iterations, "Number of training iterations");
  train->add_option("--seed", tr.seed, "Random seed");
  train->add_option("--sh-degree", tr.sh_degree, "Cap on the spherical-harmonics degree");
  train->add_option("--threads", tr.threads, "Worker threads for rasterization");
  train->add_flag("--no-texture-aware", tr.no_texture_aware,
                  "Disable texture weighting in densification");
  train->add_flag("--no-vdrc", tr.no_vdrc,
                  "Disable depth-ratio validation of split children");
  train->add_flag("--no-normal-guide", tr.no_normal_guide,
                  "Disable normal-guided placement of split children");

  // --- render ------------------------------------------------------------
  desksplat::RenderCliOptions rd;
  CLI::App* render = app.add_subcommand("render", "Render one view from a checkpoint");
  render->add_option("--checkpoint", rd.checkpoint, "Checkpoint prefix or .ply path");
  render->add_option("--dataset", rd.dataset_dir, "Dataset directory providing the cameras");
  render->add_option("--view", rd.view, "View name or index (default: first view)");
  render->add_option("--out", rd.out_png, "Output color PNG");
  render->add_option("--depth", rd.out_depth_pfm, "Also write the depth map as PFM");
  render->add_option("--weight", rd.out_weight_png,
                     "Also write per-pixel accumulated opacity as PNG");
  render->add_option("--sh-degree", rd.sh_degree, "Spherical-harmonics degree to evaluate");
  render->add_option("--threads", rd.threads, "Worker threads for rasterization");

  // --- eval --------------------------------------------------------------
  desksplat::EvalCliOptions ev;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Report metrics for a checkpoint");
  eval_cmd->add_option("--checkpoint", ev.checkpoint, "Checkpoint prefix or .ply path");
  eval_cmd->add_option("--dataset", ev.dataset_dir, "Dataset directory");
  eval_cmd->add_option("--split", ev.split, "Views to evaluate: heldout, train, or all");
  eval_cmd->add_option("--out", ev.out_csv, "Also write the metric table to this CSV file");
  eval_cmd->add_option("--surface-tolerance", ev.surface_tolerance,
                       "Distance counted as off-surface (default: 5% of scene extent)");
  eval_cmd->add_option("--sh-degree", ev.sh_degree, "Spherical-harmonics degree to evaluate");
  eval_cmd->add_option("--threads", ev.threads, "Worker threads for rasterization");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help or the parse error
    return code == 0 ? 0 : desksplat::kExitConfig;
  }

  if (synth->parsed()) return desksplat::cmd_synth(synth_spec, synth_out);
  if (train->parsed()) return desksplat::cmd_train(tr);
  if (render->parsed()) return desksplat::cmd_render(rd);
  if (eval_cmd->parsed()) return desksplat::cmd_eval(ev);
  return desksplat::kExitUsage;
}
