#include "desksplat/train/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "desksplat/core/rng.hpp"
#include "desksplat/io/dataset.hpp"
#include "desksplat/io/image_io.hpp"
#include "desksplat/io/ply.hpp"
#include "desksplat/render/rasterizer.hpp"
#include "desksplat/synth/metrics.hpp"
#include "desksplat/train/loss.hpp"

namespace fs = std::filesystem;

namespace desksplat {

namespace {

void ensure_dir(const fs::path& p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) {
    throw io_error("cannot create directory " + p.string() + ": " + ec.message());
  }
}

std::string zero_pad6(int v) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%06d", v);
  return buf;
}

std::string png_name(const std::string& view_name) {
  if (view_name.size() >= 4 &&
      view_name.compare(view_name.size() - 4, 4, ".png") == 0) {
    return view_name;
  }
  return view_name + ".png";
}

}  // namespace

void split_heldout(size_t n_views, int modulo, std::vector<int>* train,
                   std::vector<int>* held) {
  train->clear();
  held->clear();
  if (modulo <= 0) {
    throw config_error("split_heldout: modulo must be positive");
  }
  for (size_t i = 0; i < n_views; ++i) {
    if (i % static_cast<size_t>(modulo) == 0) {
      held->push_back(static_cast<int>(i));
    } else {
      train->push_back(static_cast<int>(i));
    }
  }
  if (train->empty()) {
    *train = *held;
    held->clear();
  }
}

TrainReport train(Scene* scene, std::vector<CameraView>* views_in,
                  const TrainConfig& cfg, DecisionLog* decision_log) {
  std::vector<CameraView>& views = *views_in;
  if (cfg.iterations < 0) {
    throw config_error("train: iterations must be non-negative");
  }
  if (views.empty()) throw config_error("train: no views");
  if (cfg.max_sh_degree < 0 || cfg.max_sh_degree > kMaxShDegree)
    throw config_error("train: max_sh_degree must lie in [0, 3]");
  if (cfg.lambda_dssim < 0.0 || cfg.lambda_dssim > 1.0) {
    throw config_error("train: lambda_dssim must lie in [0, 1]");
  }
  if (cfg.eval_interval <= 0) {
    throw config_error("train: eval_interval must be positive");
  }

  TrainReport report;
  report.final_splats = scene->splats.size();
  if (cfg.iterations == 0) return report;  // nothing ran, scene untouched

  std::vector<int> train_idx, held_idx;
  split_heldout(views.size(), cfg.heldout_modulo, &train_idx, &held_idx);

  const double extent = scene_extent(views);
  OptimConfig ocfg = cfg.optim;
  if (ocfg.lr_max_steps <= 0) ocfg.lr_max_steps = cfg.iterations;
  AdamOptimizer optim(ocfg, extent, scene->splats.size());

  // Texture statistics come from the static GT images, so one pass suffices.
  for (int vi : train_idx) {
    CameraView& v = views[vi];
    v.gradient = gradient_map(v.image);
    v.texture_weight = cfg.texture_aware
                           ? texture_weight_map(v.gradient)
                           : Image(v.width, v.height, 1, 1.0);
  }

  DensifyStats stats;
  stats.resize(scene->splats.size());
  DecisionLog own_log;
  DecisionLog* log = decision_log ? decision_log : &own_log;

  const bool writing = !cfg.out_dir.empty();
  std::ofstream metrics;
  if (writing) {
    ensure_dir(cfg.out_dir);
    ensure_dir(fs::path(cfg.out_dir) / "checkpoints");
    const fs::path mpath = fs::path(cfg.out_dir) / "metrics.csv";
    metrics.open(mpath);
    if (!metrics) throw io_error("cannot open " + mpath.string());
    metrics << "iteration,loss,psnr,ssim,splat_count\n";
  }

  // Held-out render pass; falls back to the first training view when nothing
  // is held out so the metric columns stay populated.
  const auto run_eval = [&](int iter, double train_loss) {
    std::string dir;
    if (writing) {
      dir = (fs::path(cfg.out_dir) / "eval" / ("iter_" + zero_pad6(iter)))
                .string();
      ensure_dir(dir);
    }
    RenderOptions opt;
    opt.n_threads = cfg.n_threads;
    const std::vector<int>& pool = held_idx.empty() ? train_idx : held_idx;
    const size_t n_eval = held_idx.empty() ? 1 : held_idx.size();
    double psum = 0.0, ssum = 0.0;
    for (size_t k = 0; k < n_eval; ++k) {
      const CameraView& v = views[pool[k]];
      const RenderOutput out = render(*scene, v, opt);
      psum += psnr(out.color, v.image);
      ssum += ssim(out.color, v.image);
      if (!dir.empty()) {
        write_png(dir + "/" + png_name(v.name), out.color);
      }
    }
    report.heldout_psnr = psum / static_cast<double>(n_eval);
    report.heldout_ssim = ssum / static_cast<double>(n_eval);
    if (writing) {
      char row[160];
      std::snprintf(row, sizeof(row), "%d,%.8g,%.8g,%.8g,%zu\n", iter,
                    train_loss, report.heldout_psnr, report.heldout_ssim,
                    scene->splats.size());
      metrics << row;
      metrics.flush();
    }
  };

  if (writing) {
    // Baseline row: the untrained scene on the held-out views.
    RenderOptions opt;
    opt.n_threads = cfg.n_threads;
    const CameraView& v0 = views[train_idx.front()];
    const RenderOutput out0 = render(*scene, v0, opt);
    run_eval(0, compute_loss(out0.color, v0.image, cfg.lambda_dssim).loss);
  }

  Rng shuffle_rng(mix64(cfg.seed ^ 0x65706f6368ULL));
  std::vector<int> order = train_idx;
  double cur_loss = 0.0;

  for (int iter = 1; iter <= cfg.iterations; ++iter) {
    const int pos = (iter - 1) % static_cast<int>(order.size());
    if (pos == 0) std::shuffle(order.begin(), order.end(), shuffle_rng.gen);
    const int view_index = order[pos];
    CameraView& v = views[view_index];
    scene->iteration = iter;

    RenderOptions opt;
    opt.sh_degree = std::min(std::min(kMaxShDegree, cfg.max_sh_degree),
                             iter / std::max(1, cfg.sh_degree_interval));
    opt.n_threads = cfg.n_threads;
    opt.texture_weight = &v.texture_weight;

    const RenderOutput out = render(*scene, v, opt);
    const LossResult loss = compute_loss(out.color, v.image, cfg.lambda_dssim);
    cur_loss = loss.loss;
    if (!std::isfinite(loss.loss)) {
      if (writing) {
        quantize_to_storage(scene);
        save_checkpoint((fs::path(cfg.out_dir) / "checkpoints" /
                         ("diagnostic_" + zero_pad6(iter)))
                            .string(),
                        *scene);
      }
      throw numeric_error("train: non-finite loss at iteration " +
                          std::to_string(iter));
    }

    const BackwardOutput back = render_backward(*scene, v, loss.d_render, opt);
    optim.step(scene, back.grads, iter);
    update_reference_view(scene, view_index, out.per_splat_max_weight);
    stats.observe_render(out);
    stats.observe_backward(back);

    if (iter % cfg.adc.densify_interval == 0 && iter >= cfg.adc.densify_from &&
        iter <= cfg.adc.densify_until) {
      const double threshold =
          adaptive_threshold(iter, cfg.adc.densify_from, cfg.adc.densify_until);
      const std::vector<int> blur_ids =
          select_blur_splats(stats.max_weighted_area, threshold);
      const AdcResult res =
          adc_step(scene, stats, blur_ids, views, cfg.adc, extent,
                   optim.position_lr(iter), cfg.seed, log);
      optim.remap(res.old_index);
      stats.resize(scene->splats.size());
    }

    if (writing && (iter % cfg.eval_interval == 0 || iter == cfg.iterations)) {
      quantize_to_storage(scene);
      save_checkpoint(
          (fs::path(cfg.out_dir) / "checkpoints" / ("ckpt_" + zero_pad6(iter)))
              .string(),
          *scene);
      run_eval(iter, cur_loss);
    }
  }

  if (writing && decision_log == nullptr && !own_log.rows.empty()) {
    own_log.append_csv((fs::path(cfg.out_dir) / "decisions.csv").string());
  }

  report.iterations_run = cfg.iterations;
  report.final_loss = cur_loss;
  report.final_splats = scene->splats.size();
  return report;
}

}  // namespace desksplat
