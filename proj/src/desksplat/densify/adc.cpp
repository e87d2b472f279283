#include "desksplat/densify/adc.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace desksplat {

AdcResult adc_step(Scene* scene, const DensifyStats& stats, const std::vector<int>& blur_ids,
                   const std::vector<CameraView>& views, const AdcConfig& cfg,
                   double scene_extent, double clone_shift, uint64_t seed, DecisionLog* log) {
  const int n = static_cast<int>(scene->splats.size());
  AdcResult result;

  std::unordered_set<int> split_set;
  for (int id : blur_ids)
    if (id >= 0 && id < n) split_set.insert(id);

  std::vector<int> clone_set;
  for (int i = 0; i < n; ++i) {
    if (stats.denom[i] <= 0) continue;
    if (stats.grad_accum[i] / stats.denom[i] <= cfg.grad_threshold) continue;
    const double max_scale = scene->splats[i].scale().maxCoeff();
    if (max_scale > cfg.scale_split_threshold * scene_extent)
      split_set.insert(i);
    else if (!split_set.count(i))
      clone_set.push_back(i);
  }

  SplitContext ctx;
  ctx.views = &views;
  ctx.seed = seed;
  ctx.iteration = scene->iteration;
  ctx.delta_p = cfg.delta_p;
  ctx.split_scale_divisor = cfg.split_scale_divisor;
  ctx.use_vdrc = cfg.use_vdrc;
  ctx.use_normal_guide = cfg.use_normal_guide;

  // Parent depth check: failing candidates sit this round out, untouched.
  std::unordered_set<int> excluded;
  if (cfg.use_vdrc) {
    std::vector<int> candidates(split_set.begin(), split_set.end());
    std::sort(candidates.begin(), candidates.end());  // deterministic log order
    for (int id : candidates) {
      const VdrcCheck check = vdrc_parent(scene->splats[id], views, cfg.delta_p);
      if (log)
        log->rows.push_back({scene->iteration, id, 'p', stats.max_weighted_area[id],
                             check.p, check.keep});
      if (!check.keep) {
        excluded.insert(id);
        ++result.n_excluded;
      }
    }
    for (int id : excluded) split_set.erase(id);
  }

  // Phase one: splits in place, clones appended.
  std::vector<GaussianSplat> grown;
  std::vector<int> grown_old;
  grown.reserve(n + split_set.size() + clone_set.size());
  for (int i = 0; i < n; ++i) {
    if (split_set.count(i)) {
      DecisionLog local;
      std::vector<GaussianSplat> children = sample_children(
          scene->splats[i], i, cfg.children_per_split, ctx, stats.max_weighted_area[i],
          &local);
      for (size_t c = 0; c < children.size(); ++c) {
        grown.push_back(std::move(children[c]));
        // A discarded child slot holds the parent itself and keeps its state.
        grown_old.push_back(local.rows[c].keep ? -1 : i);
      }
      if (log)
        log->rows.insert(log->rows.end(), local.rows.begin(), local.rows.end());
      ++result.n_split;
    } else {
      grown.push_back(scene->splats[i]);
      grown_old.push_back(i);
    }
  }
  for (int i : clone_set) {
    GaussianSplat clone = scene->splats[i];
    if (stats.denom[i] > 0)
      clone.mu -= clone_shift * (stats.grad3d_accum[i] / stats.denom[i]);
    clone.max_weight = 0.0;
    clone.init_ref_view = clone.ref_view;
    clone.init_depth_ratio = kUnsetRatio;
    if (clone.ref_view >= 0 && clone.ref_view < static_cast<int>(views.size())) {
      const auto r = depth_ratio(clone.mu, views[clone.ref_view]);
      if (r) clone.init_depth_ratio = *r;
    }
    grown.push_back(std::move(clone));
    grown_old.push_back(-1);
    ++result.n_cloned;
  }

  // Phase two: prune, then the periodic opacity clamp.
  scene->splats.clear();
  for (size_t i = 0; i < grown.size(); ++i) {
    if (grown[i].alpha() < cfg.opacity_prune_floor) {
      ++result.n_pruned;
      continue;
    }
    scene->splats.push_back(std::move(grown[i]));
    result.old_index.push_back(grown_old[i]);
  }

  if (cfg.opacity_reset_interval > 0 && scene->iteration > 0 &&
      scene->iteration % cfg.opacity_reset_interval == 0) {
    const double cap = logit(0.01);
    for (auto& g : scene->splats) g.opacity = std::min(g.opacity, cap);
  }
  return result;
}

}  // namespace desksplat
