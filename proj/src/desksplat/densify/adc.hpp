#pragma once

#include <cstdint>
#include <vector>

#include "desksplat/densify/geometry.hpp"
#include "desksplat/densify/texture.hpp"

namespace desksplat {

struct AdcConfig {
  double grad_threshold = 2e-4;        // mean screen-space gradient that triggers growth
  int densify_interval = 100;
  double opacity_prune_floor = 0.005;  // activated opacity below this is dropped
  double scale_split_threshold = 0.01; // fraction of scene extent separating clone/split
  double split_scale_divisor = 1.6;
  double delta_p = 0.1;                // relative depth-ratio tolerance
  int densify_from = 500;
  int densify_until = 15000;
  int opacity_reset_interval = 3000;
  int children_per_split = 2;
  bool use_vdrc = true;
  bool use_normal_guide = true;
};

struct AdcResult {
  // Per splat of the mutated scene: its index before the step, or -1 for a
  // splat that did not exist (optimizer state starts fresh for those).
  std::vector<int> old_index;
  int n_cloned = 0;
  int n_split = 0;
  int n_pruned = 0;
  int n_excluded = 0;  // split candidates held back by the parent depth check
};

// One densify/prune round. Splats whose windowed mean screen gradient
// exceeds the threshold are cloned (small) or split (large); blur-selected
// ids are split regardless of gradient. Split parents are replaced in place
// by their children; clones are appended shifted one position-step down the
// accumulated world gradient; pruning and the periodic opacity clamp run on
// the mutated set.
AdcResult adc_step(Scene* scene, const DensifyStats& stats, const std::vector<int>& blur_ids,
                   const std::vector<CameraView>& views, const AdcConfig& cfg,
                   double scene_extent, double clone_shift, uint64_t seed, DecisionLog* log);

}  // namespace desksplat
