#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "desksplat/core/splat.hpp"
#include "desksplat/densify/adc.hpp"
#include "desksplat/train/optimizer.hpp"

namespace desksplat {

struct TrainConfig {
  int iterations = 30000;
  double lambda_dssim = 0.2;
  OptimConfig optim;  // lr_max_steps 0 resolves to `iterations`
  AdcConfig adc;
  uint64_t seed = 0;
  int eval_interval = 1000;      // checkpoint + held-out evaluation cadence
  int sh_degree_interval = 1000; // one more SH band activates per interval
  int max_sh_degree = kMaxShDegree;  // cap on the progressive SH degree
  int n_threads = 1;
  // Off: every pixel weighs 1, so the blur statistic degenerates to a plain
  // pixel count and selection loses its texture preference. The threshold
  // schedule is unchanged.
  bool texture_aware = true;
  int heldout_modulo = 8;  // view indices 0, m, 2m, ... are held out
  std::string out_dir;     // empty: train in memory, write no artifacts
};

struct TrainReport {
  int iterations_run = 0;
  double final_loss = 0.0;
  double heldout_psnr = 0.0;  // mean over held-out views at the last eval
  double heldout_ssim = 0.0;
  size_t final_splats = 0;
};

// Every modulo-th view index goes to *held, the rest to *train. If that would
// leave the training set empty, everything trains and *held stays empty.
void split_heldout(size_t n_views, int modulo, std::vector<int>* train,
                   std::vector<int>* held);

// Optimizes the scene in place. Views are mutated: per-view gradient and
// texture-weight maps are derived from the GT images up front. When out_dir
// is set, writes metrics.csv, checkpoints/ (quantized to storage precision
// before saving, so the live scene continues from exactly the stored state),
// eval renders, and the densify decision log. A non-finite loss writes a
// diagnostic checkpoint and raises numeric_error. Rows appended to
// decision_log (own log if null) record every densify depth check.
TrainReport train(Scene* scene, std::vector<CameraView>* views,
                  const TrainConfig& cfg, DecisionLog* decision_log = nullptr);

}  // namespace desksplat
