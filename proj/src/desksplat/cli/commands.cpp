#include "desksplat/cli/commands.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "desksplat/io/dataset.hpp"
#include "desksplat/io/image_io.hpp"
#include "desksplat/io/ply.hpp"
#include "desksplat/render/rasterizer.hpp"
#include "desksplat/synth/generator.hpp"
#include "desksplat/synth/metrics.hpp"
#include "desksplat/synth/scene_spec.hpp"
#include "desksplat/train/loss.hpp"

namespace desksplat {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

int run_guarded(const char* name, const std::function<void()>& body) {
  try {
    body();
    return kExitOk;
  } catch (const config_error& e) {
    std::cerr << name << ": " << e.what() << "\n";
    return kExitConfig;
  } catch (const io_error& e) {
    std::cerr << name << ": " << e.what() << "\n";
    return kExitData;
  } catch (const numeric_error& e) {
    std::cerr << name << ": " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << name << ": unexpected error: " << e.what() << "\n";
    return kExitUsage;
  }
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Run manifest: the fully resolved training configuration. Re-running from a
// manifest reproduces the run bit-exactly at a fixed thread count.
// ---------------------------------------------------------------------------

json train_config_to_json(const TrainConfig& cfg, const std::string& dataset_dir,
                          const std::vector<std::string>& notes) {
  json optim{{"lr_position_init", cfg.optim.lr_position_init},
             {"lr_position_final", cfg.optim.lr_position_final},
             {"lr_max_steps", cfg.optim.lr_max_steps},
             {"lr_sh", cfg.optim.lr_sh},
             {"lr_opacity", cfg.optim.lr_opacity},
             {"lr_scale", cfg.optim.lr_scale},
             {"lr_rotation", cfg.optim.lr_rotation},
             {"beta1", cfg.optim.beta1},
             {"beta2", cfg.optim.beta2},
             {"eps", cfg.optim.eps}};
  json adc{{"grad_threshold", cfg.adc.grad_threshold},
           {"densify_interval", cfg.adc.densify_interval},
           {"opacity_prune_floor", cfg.adc.opacity_prune_floor},
           {"scale_split_threshold", cfg.adc.scale_split_threshold},
           {"split_scale_divisor", cfg.adc.split_scale_divisor},
           {"delta_p", cfg.adc.delta_p},
           {"densify_from", cfg.adc.densify_from},
           {"densify_until", cfg.adc.densify_until},
           {"opacity_reset_interval", cfg.adc.opacity_reset_interval},
           {"children_per_split", cfg.adc.children_per_split},
           {"use_vdrc", cfg.adc.use_vdrc},
           {"use_normal_guide", cfg.adc.use_normal_guide}};
  json train{{"iterations", cfg.iterations},
             {"lambda_dssim", cfg.lambda_dssim},
             {"seed", cfg.seed},
             {"eval_interval", cfg.eval_interval},
             {"sh_degree_interval", cfg.sh_degree_interval},
             {"max_sh_degree", cfg.max_sh_degree},
             {"n_threads", cfg.n_threads},
             {"texture_aware", cfg.texture_aware},
             {"heldout_modulo", cfg.heldout_modulo},
             {"optim", optim},
             {"adc", adc}};
  json j{{"kind", "desksplat_run_manifest"},
         {"version", 1},
         {"dataset", dataset_dir},
         {"out_dir", cfg.out_dir},
         {"train", train},
         {"toggles", json{{"texture_aware", cfg.texture_aware},
                          {"vdrc", cfg.adc.use_vdrc},
                          {"normal_guide", cfg.adc.use_normal_guide}}},
         {"notes", notes}};
  return j;
}

void apply_train_json(const json& t, TrainConfig* cfg) {
  cfg->iterations = t.at("iterations").get<int>();
  cfg->lambda_dssim = t.at("lambda_dssim").get<double>();
  cfg->seed = t.at("seed").get<uint64_t>();
  cfg->eval_interval = t.at("eval_interval").get<int>();
  cfg->sh_degree_interval = t.at("sh_degree_interval").get<int>();
  cfg->max_sh_degree = t.at("max_sh_degree").get<int>();
  cfg->n_threads = t.at("n_threads").get<int>();
  cfg->texture_aware = t.at("texture_aware").get<bool>();
  cfg->heldout_modulo = t.at("heldout_modulo").get<int>();
  const json& o = t.at("optim");
  cfg->optim.lr_position_init = o.at("lr_position_init").get<double>();
  cfg->optim.lr_position_final = o.at("lr_position_final").get<double>();
  cfg->optim.lr_max_steps = o.at("lr_max_steps").get<int>();
  cfg->optim.lr_sh = o.at("lr_sh").get<double>();
  cfg->optim.lr_opacity = o.at("lr_opacity").get<double>();
  cfg->optim.lr_scale = o.at("lr_scale").get<double>();
  cfg->optim.lr_rotation = o.at("lr_rotation").get<double>();
  cfg->optim.beta1 = o.at("beta1").get<double>();
  cfg->optim.beta2 = o.at("beta2").get<double>();
  cfg->optim.eps = o.at("eps").get<double>();
  const json& a = t.at("adc");
  cfg->adc.grad_threshold = a.at("grad_threshold").get<double>();
  cfg->adc.densify_interval = a.at("densify_interval").get<int>();
  cfg->adc.opacity_prune_floor = a.at("opacity_prune_floor").get<double>();
  cfg->adc.scale_split_threshold = a.at("scale_split_threshold").get<double>();
  cfg->adc.split_scale_divisor = a.at("split_scale_divisor").get<double>();
  cfg->adc.delta_p = a.at("delta_p").get<double>();
  cfg->adc.densify_from = a.at("densify_from").get<int>();
  cfg->adc.densify_until = a.at("densify_until").get<int>();
  cfg->adc.opacity_reset_interval = a.at("opacity_reset_interval").get<int>();
  cfg->adc.children_per_split = a.at("children_per_split").get<int>();
  cfg->adc.use_vdrc = a.at("use_vdrc").get<bool>();
  cfg->adc.use_normal_guide = a.at("use_normal_guide").get<bool>();
}

json read_json_file(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw io_error(std::string("cannot open ") + what + ": " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw config_error(std::string("invalid JSON in ") + what + " " + path + ": " + e.what());
  }
  return j;
}

// Partial overrides from a user config file: only the keys present are
// applied, with the same nesting as the manifest's "train" block.
void apply_config_overrides(const json& t, TrainConfig* cfg) {
  try {
    if (t.contains("iterations")) cfg->iterations = t["iterations"].get<int>();
    if (t.contains("lambda_dssim")) cfg->lambda_dssim = t["lambda_dssim"].get<double>();
    if (t.contains("seed")) cfg->seed = t["seed"].get<uint64_t>();
    if (t.contains("eval_interval")) cfg->eval_interval = t["eval_interval"].get<int>();
    if (t.contains("sh_degree_interval"))
      cfg->sh_degree_interval = t["sh_degree_interval"].get<int>();
    if (t.contains("max_sh_degree")) cfg->max_sh_degree = t["max_sh_degree"].get<int>();
    if (t.contains("n_threads")) cfg->n_threads = t["n_threads"].get<int>();
    if (t.contains("texture_aware")) cfg->texture_aware = t["texture_aware"].get<bool>();
    if (t.contains("heldout_modulo")) cfg->heldout_modulo = t["heldout_modulo"].get<int>();
    if (t.contains("optim")) {
      const json& o = t["optim"];
      auto set = [&o](const char* key, double* field) {
        if (o.contains(key)) *field = o[key].get<double>();
      };
      set("lr_position_init", &cfg->optim.lr_position_init);
      set("lr_position_final", &cfg->optim.lr_position_final);
      if (o.contains("lr_max_steps")) cfg->optim.lr_max_steps = o["lr_max_steps"].get<int>();
      set("lr_sh", &cfg->optim.lr_sh);
      set("lr_opacity", &cfg->optim.lr_opacity);
      set("lr_scale", &cfg->optim.lr_scale);
      set("lr_rotation", &cfg->optim.lr_rotation);
      set("beta1", &cfg->optim.beta1);
      set("beta2", &cfg->optim.beta2);
      set("eps", &cfg->optim.eps);
    }
    if (t.contains("adc")) {
      const json& a = t["adc"];
      if (a.contains("grad_threshold")) cfg->adc.grad_threshold = a["grad_threshold"].get<double>();
      if (a.contains("densify_interval"))
        cfg->adc.densify_interval = a["densify_interval"].get<int>();
      if (a.contains("opacity_prune_floor"))
        cfg->adc.opacity_prune_floor = a["opacity_prune_floor"].get<double>();
      if (a.contains("scale_split_threshold"))
        cfg->adc.scale_split_threshold = a["scale_split_threshold"].get<double>();
      if (a.contains("split_scale_divisor"))
        cfg->adc.split_scale_divisor = a["split_scale_divisor"].get<double>();
      if (a.contains("delta_p")) cfg->adc.delta_p = a["delta_p"].get<double>();
      if (a.contains("densify_from")) cfg->adc.densify_from = a["densify_from"].get<int>();
      if (a.contains("densify_until")) cfg->adc.densify_until = a["densify_until"].get<int>();
      if (a.contains("opacity_reset_interval"))
        cfg->adc.opacity_reset_interval = a["opacity_reset_interval"].get<int>();
      if (a.contains("children_per_split"))
        cfg->adc.children_per_split = a["children_per_split"].get<int>();
      if (a.contains("use_vdrc")) cfg->adc.use_vdrc = a["use_vdrc"].get<bool>();
      if (a.contains("use_normal_guide"))
        cfg->adc.use_normal_guide = a["use_normal_guide"].get<bool>();
    }
  } catch (const json::exception& e) {
    throw config_error(std::string("config override: bad field type: ") + e.what());
  }
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw io_error("cannot create " + dir.string() + ": " + ec.message());
}

// Accepts a checkpoint prefix with or without the .ply suffix.
std::string checkpoint_prefix(const std::string& path) {
  if (path.size() > 4 && path.substr(path.size() - 4) == ".ply")
    return path.substr(0, path.size() - 4);
  return path;
}

const CameraView& select_view(const std::vector<CameraView>& views, const std::string& sel) {
  if (views.empty()) throw config_error("dataset has no views");
  if (sel.empty()) return views.front();
  const bool numeric = std::all_of(sel.begin(), sel.end(),
                                   [](unsigned char c) { return std::isdigit(c); });
  if (numeric) {
    const size_t idx = std::stoul(sel);
    if (idx >= views.size())
      throw config_error("view index " + sel + " out of range (dataset has " +
                         std::to_string(views.size()) + " views)");
    return views[idx];
  }
  for (const auto& v : views)
    if (v.name == sel || fs::path(v.name).stem().string() == sel) return v;
  throw config_error("no view named \"" + sel + "\" in the dataset");
}

}  // namespace

int cmd_synth(const std::string& spec_file, const std::string& out_dir) {
  return run_guarded("synth", [&] {
    const SyntheticSceneSpec spec = load_scene_spec(spec_file);
    ensure_directory(out_dir);
    const GeneratedDataset data = generate_dataset(spec, out_dir);
    std::cout << "synth: wrote " << data.views.size() << " views, " << data.points.size()
              << " sparse points, " << data.faces.size() << " surfaces to " << out_dir
              << "\n";
  });
}

int cmd_train(const TrainCliOptions& opts) {
  return run_guarded("train", [&] {
    TrainConfig cfg;
    std::string dataset_dir = opts.dataset_dir;
    std::string out_dir = opts.out_dir;

    if (!opts.from_manifest.empty()) {
      const json m = read_json_file(opts.from_manifest, "manifest");
      try {
        if (m.value("kind", "") != "desksplat_run_manifest")
          throw config_error("not a run manifest: " + opts.from_manifest);
        apply_train_json(m.at("train"), &cfg);
        if (dataset_dir.empty()) dataset_dir = m.at("dataset").get<std::string>();
        if (out_dir.empty()) out_dir = m.at("out_dir").get<std::string>();
      } catch (const json::exception& e) {
        throw config_error("manifest " + opts.from_manifest + ": " + e.what());
      }
    }
    if (!opts.config_file.empty())
      apply_config_overrides(read_json_file(opts.config_file, "config file"), &cfg);

    if (opts.iterations >= 0) cfg.iterations = opts.iterations;
    if (opts.seed >= 0) cfg.seed = static_cast<uint64_t>(opts.seed);
    if (opts.sh_degree >= 0) cfg.max_sh_degree = opts.sh_degree;
    if (opts.threads >= 1) cfg.n_threads = opts.threads;
    if (opts.no_texture_aware) cfg.texture_aware = false;
    if (opts.no_vdrc) cfg.adc.use_vdrc = false;
    if (opts.no_normal_guide) cfg.adc.use_normal_guide = false;

    if (dataset_dir.empty()) throw config_error("--dataset is required");
    if (out_dir.empty()) throw config_error("--out is required");
    cfg.out_dir = out_dir;

    Dataset ds = load_dataset(dataset_dir);
    std::vector<std::string> notes;
    if (cfg.adc.use_vdrc && !ds.any_depth_prior()) {
      cfg.adc.use_vdrc = false;
      notes.push_back("vdrc auto-disabled: dataset provides no depth priors");
      std::cerr << "train: warning: dataset has no depth priors; "
                   "depth-ratio validation disabled for this run\n";
    }

    ensure_directory(out_dir);
    {
      std::ofstream mf(fs::path(out_dir) / "manifest.json");
      if (!mf) throw io_error("cannot write manifest in " + out_dir);
      mf << train_config_to_json(cfg, dataset_dir, notes).dump(2) << "\n";
    }

    Scene scene = build_initial_scene(ds);
    // The stored state is what training continues from, so the initial
    // checkpoint is quantized exactly like every later one.
    quantize_to_storage(&scene);
    ensure_directory(fs::path(out_dir) / "checkpoints");
    save_checkpoint((fs::path(out_dir) / "checkpoints" / "ckpt_000000").string(), scene);

    const TrainReport report = train(&scene, &ds.views, cfg);
    std::cout << "train: " << report.iterations_run << " iterations, "
              << report.final_splats << " splats, final loss " << report.final_loss
              << ", held-out psnr " << report.heldout_psnr << " ssim "
              << report.heldout_ssim << "\n";
  });
}

int cmd_render(const RenderCliOptions& opts) {
  return run_guarded("render", [&] {
    if (opts.checkpoint.empty()) throw config_error("--checkpoint is required");
    if (opts.dataset_dir.empty()) throw config_error("--dataset is required");
    if (opts.out_png.empty()) throw config_error("--out is required");
    if (opts.sh_degree < 0 || opts.sh_degree > kMaxShDegree)
      throw config_error("--sh-degree must lie in [0, 3]");

    const Scene scene = load_checkpoint(checkpoint_prefix(opts.checkpoint));
    const Dataset ds = load_dataset(opts.dataset_dir);
    const CameraView& view = select_view(ds.views, opts.view);

    RenderOptions ropt;
    ropt.sh_degree = opts.sh_degree;
    ropt.n_threads = std::max(1, opts.threads);
    const RenderOutput out = render(scene, view, ropt);

    write_png(opts.out_png, out.color);
    if (!opts.out_depth_pfm.empty()) write_pfm(opts.out_depth_pfm, out.depth);
    if (!opts.out_weight_png.empty()) {
      Image weight(out.width, out.height, 1, 0.0);
      for (int y = 0; y < out.height; ++y)
        for (int x = 0; x < out.width; ++x)
          weight.at(x, y) = 1.0 - out.transmittance.at(x, y);
      write_png(opts.out_weight_png, weight);
    }
    std::cout << "render: " << scene.splats.size() << " splats at view " << view.name
              << " -> " << opts.out_png << "\n";
  });
}

int cmd_eval(const EvalCliOptions& opts) {
  return run_guarded("eval", [&] {
    if (opts.checkpoint.empty()) throw config_error("--checkpoint is required");
    if (opts.dataset_dir.empty()) throw config_error("--dataset is required");
    if (opts.sh_degree < 0 || opts.sh_degree > kMaxShDegree)
      throw config_error("--sh-degree must lie in [0, 3]");

    const Scene scene = load_checkpoint(checkpoint_prefix(opts.checkpoint));
    const Dataset ds = load_dataset(opts.dataset_dir);

    std::vector<int> train_idx, held_idx, selected;
    split_heldout(ds.views.size(), 8, &train_idx, &held_idx);
    if (opts.split == "heldout") {
      selected = held_idx;
    } else if (opts.split == "train") {
      selected = train_idx;
    } else if (opts.split == "all") {
      for (size_t i = 0; i < ds.views.size(); ++i) selected.push_back(static_cast<int>(i));
    } else {
      throw config_error("--split must be heldout, train, or all");
    }
    if (selected.empty()) throw config_error("split \"" + opts.split + "\" has no views");

    RenderOptions ropt;
    ropt.sh_degree = opts.sh_degree;
    ropt.n_threads = std::max(1, opts.threads);
    double psnr_sum = 0.0, ssim_sum = 0.0;
    for (int idx : selected) {
      const RenderOutput out = render(scene, ds.views[idx], ropt);
      psnr_sum += psnr(out.color, ds.views[idx].image);
      ssim_sum += ssim(out.color, ds.views[idx].image);
    }

    std::ostringstream table;
    table << "metric,value\n";
    table << "views," << selected.size() << "\n";
    table << "psnr," << fmt17(psnr_sum / selected.size()) << "\n";
    table << "ssim," << fmt17(ssim_sum / selected.size()) << "\n";
    table << "splat_count," << scene.splats.size() << "\n";

    const fs::path gt_path = fs::path(opts.dataset_dir) / "gt_surfaces.json";
    if (fs::exists(gt_path)) {
      const std::vector<GtSurface> faces = load_gt_surfaces(gt_path.string());
      if (!faces.empty()) {
        std::vector<Vec3> centers;
        centers.reserve(scene.splats.size());
        for (const auto& g : scene.splats) centers.push_back(g.mu);
        const double tol = opts.surface_tolerance >= 0.0
                               ? opts.surface_tolerance
                               : 0.05 * scene_extent(ds.views);
        const SurfaceFitStats fit = surface_fit_error(centers, bare_faces(faces), tol);
        table << "surface_tolerance," << fmt17(tol) << "\n";
        table << "surface_mean," << fmt17(fit.mean) << "\n";
        table << "surface_median," << fmt17(fit.median) << "\n";
        table << "surface_p95," << fmt17(fit.p95) << "\n";
        table << "surface_fraction_above," << fmt17(fit.fraction_above) << "\n";
        // The density contrast only exists when the ground truth labels both
        // a textured and a textureless region.
        double area_textured = 0.0, area_textureless = 0.0;
        for (const auto& f : faces) {
          const double area = f.face.edge0.cross(f.face.edge1).norm();
          (f.textured ? area_textured : area_textureless) += area;
        }
        if (area_textured > 0.0 && area_textureless > 0.0) {
          const DensityBreakdown density = density_breakdown(centers, faces);
          table << "density_ratio," << fmt17(density.ratio) << "\n";
          table << "density_textured," << density.n_textured << "\n";
          table << "density_textureless," << density.n_textureless << "\n";
        }
      }
    }

    std::cout << table.str();
    if (!opts.out_csv.empty()) {
      std::ofstream out(opts.out_csv);
      if (!out) throw io_error("cannot write " + opts.out_csv);
      out << table.str();
    }
  });
}

}  // namespace desksplat
