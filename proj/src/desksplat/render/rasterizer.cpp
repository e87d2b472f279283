#include "desksplat/render/rasterizer.hpp"

#include <algorithm>
#include <cmath>

#include "desksplat/core/parallel.hpp"

namespace desksplat {

std::vector<ProjectedSplat> project_scene(const Scene& scene, const CameraView& cam,
                                          const RenderOptions& opt) {
  const int n = static_cast<int>(scene.splats.size());
  std::vector<std::optional<ProjectedSplat>> maybe(n);
  parallel_chunks(n, opt.n_threads, [&](size_t begin, size_t end, int) {
    for (size_t i = begin; i < end; ++i)
      maybe[i] = project_splat(scene.splats[i], static_cast<int>(i), cam, opt.sh_degree);
  });
  std::vector<ProjectedSplat> proj;
  proj.reserve(n);
  for (auto& m : maybe)
    if (m) proj.push_back(std::move(*m));
  return proj;
}

// (depth, id) keeps ties deterministic everywhere.
void sort_by_depth(std::vector<int>* ids, const std::vector<ProjectedSplat>& proj) {
  std::sort(ids->begin(), ids->end(), [&](int a, int b) {
    if (proj[a].depth != proj[b].depth) return proj[a].depth < proj[b].depth;
    return proj[a].splat_id < proj[b].splat_id;
  });
}

namespace {

void init_output(RenderOutput* out, int w, int h, int n_splats) {
  out->width = w;
  out->height = h;
  out->color = Image(w, h, 3);
  out->depth = Image(w, h, 1);
  out->transmittance = Image(w, h, 1, 1.0);
  out->index_max.assign(static_cast<size_t>(w) * h, -1);
  out->per_splat_max_weight.assign(n_splats, 0.0);
  out->contribution_count.assign(n_splats, 0);
  out->weighted_contribution.assign(n_splats, 0.0);
}

struct PixelStats {
  double max_weight = 0.0;  // best blend weight of the winning splat
  int winner = -1;
};

// Front-to-back compositing of one pixel over an already depth-sorted list.
// Writes color/depth/transmittance into `out` and reports the winner; the
// caller owns all per-splat accumulation.
template <typename WeightFn>
PixelStats composite_pixel(int px, int py, const std::vector<int>& order,
                           const std::vector<ProjectedSplat>& proj, RenderOutput* out,
                           WeightFn&& on_weight) {
  double t = 1.0;
  Vec3 color = Vec3::Zero();
  double depth_sum = 0.0;
  PixelStats stats;
  for (const int idx : order) {
    const ProjectedSplat& ps = proj[idx];
    if (!ps.in_rect(px, py)) continue;
    const Vec2 d(px + 0.5 - ps.mu2d.x(), py + 0.5 - ps.mu2d.y());
    const double q = d.dot(ps.inv_cov2d * d);
    double w = ps.alpha * std::exp(-0.5 * q);
    if (w > kBlendWeightCap) w = kBlendWeightCap;
    const double t_next = t * (1.0 - w);
    if (t_next < kTransmittanceCutoff) break;  // this splat is not composited
    color += ps.color * (w * t);
    depth_sum += ps.depth * w * t;
    on_weight(idx, w);
    if (w > stats.max_weight) {
      stats.max_weight = w;
      stats.winner = ps.splat_id;
    }
    t = t_next;
  }
  out->color.at(px, py, 0) = color.x();
  out->color.at(px, py, 1) = color.y();
  out->color.at(px, py, 2) = color.z();
  const double opacity_total = 1.0 - t;
  out->depth.at(px, py) = opacity_total > 0.0 ? depth_sum / opacity_total : 0.0;
  out->transmittance.at(px, py) = t;
  out->index_max[static_cast<size_t>(py) * out->width + px] = stats.winner;
  return stats;
}

}  // namespace

RenderOutput render(const Scene& scene, const CameraView& cam, const RenderOptions& opt) {
  const int w = cam.width, h = cam.height;
  const int n = static_cast<int>(scene.splats.size());
  RenderOutput out;
  init_output(&out, w, h, n);

  const std::vector<ProjectedSplat> proj = project_scene(scene, cam, opt);

  const int tiles_x = (w + kTileSize - 1) / kTileSize;
  const int tiles_y = (h + kTileSize - 1) / kTileSize;
  std::vector<std::vector<int>> tile_lists(static_cast<size_t>(tiles_x) * tiles_y);
  for (int i = 0; i < static_cast<int>(proj.size()); ++i) {
    const ProjectedSplat& ps = proj[i];
    for (int ty = ps.y_min / kTileSize; ty <= ps.y_max / kTileSize; ++ty)
      for (int tx = ps.x_min / kTileSize; tx <= ps.x_max / kTileSize; ++tx)
        tile_lists[static_cast<size_t>(ty) * tiles_x + tx].push_back(i);
  }

  const int n_threads = std::max(1, opt.n_threads);
  // Per-thread per-splat partials, merged in thread order below.
  std::vector<std::vector<double>> thr_maxw(n_threads, std::vector<double>(n, 0.0));
  std::vector<std::vector<int>> thr_count(n_threads, std::vector<int>(n, 0));
  std::vector<std::vector<double>> thr_wsum(n_threads, std::vector<double>(n, 0.0));

  parallel_chunks(tile_lists.size(), n_threads, [&](size_t begin, size_t end, int thread) {
    std::vector<double>& maxw = thr_maxw[thread];
    std::vector<int>& count = thr_count[thread];
    std::vector<double>& wsum = thr_wsum[thread];
    for (size_t tile = begin; tile < end; ++tile) {
      std::vector<int>& order = tile_lists[tile];
      sort_by_depth(&order, proj);
      const int tx = static_cast<int>(tile) % tiles_x;
      const int ty = static_cast<int>(tile) / tiles_x;
      const int x1 = std::min(w, (tx + 1) * kTileSize);
      const int y1 = std::min(h, (ty + 1) * kTileSize);
      for (int py = ty * kTileSize; py < y1; ++py)
        for (int px = tx * kTileSize; px < x1; ++px) {
          const PixelStats stats =
              composite_pixel(px, py, order, proj, &out, [&](int idx, double weight) {
                double& best = maxw[proj[idx].splat_id];
                if (weight > best) best = weight;
              });
          if (stats.winner >= 0) {
            ++count[stats.winner];
            if (opt.texture_weight) wsum[stats.winner] += opt.texture_weight->at(px, py);
          }
        }
    }
  });

  for (int t = 0; t < n_threads; ++t)
    for (int i = 0; i < n; ++i) {
      out.per_splat_max_weight[i] = std::max(out.per_splat_max_weight[i], thr_maxw[t][i]);
      out.contribution_count[i] += thr_count[t][i];
      out.weighted_contribution[i] += thr_wsum[t][i];
    }
  return out;
}

RenderOutput render_brute_force(const Scene& scene, const CameraView& cam,
                                const RenderOptions& opt) {
  const int w = cam.width, h = cam.height;
  const int n = static_cast<int>(scene.splats.size());
  RenderOutput out;
  init_output(&out, w, h, n);

  std::vector<ProjectedSplat> proj;
  for (int i = 0; i < n; ++i)
    if (auto p = project_splat(scene.splats[i], i, cam, opt.sh_degree)) proj.push_back(*p);
  std::vector<int> order(proj.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return proj[a].depth < proj[b].depth; });

  for (int py = 0; py < h; ++py)
    for (int px = 0; px < w; ++px) {
      double t = 1.0;
      Vec3 color = Vec3::Zero();
      double depth_sum = 0.0;
      double best_w = 0.0;
      int winner = -1;
      for (const int idx : order) {
        const ProjectedSplat& ps = proj[idx];
        if (!ps.in_rect(px, py)) continue;
        const Vec2 d(px + 0.5 - ps.mu2d.x(), py + 0.5 - ps.mu2d.y());
        const double q = d.dot(ps.inv_cov2d * d);
        const double weight = std::min(kBlendWeightCap, ps.alpha * std::exp(-0.5 * q));
        const double t_next = t * (1.0 - weight);
        if (t_next < kTransmittanceCutoff) break;
        color += ps.color * (weight * t);
        depth_sum += ps.depth * weight * t;
        out.per_splat_max_weight[ps.splat_id] =
            std::max(out.per_splat_max_weight[ps.splat_id], weight);
        if (weight > best_w) {
          best_w = weight;
          winner = ps.splat_id;
        }
        t = t_next;
      }
      out.color.at(px, py, 0) = color.x();
      out.color.at(px, py, 1) = color.y();
      out.color.at(px, py, 2) = color.z();
      out.depth.at(px, py) = t < 1.0 ? depth_sum / (1.0 - t) : 0.0;
      out.transmittance.at(px, py) = t;
      out.index_max[static_cast<size_t>(py) * w + px] = winner;
      if (winner >= 0) {
        ++out.contribution_count[winner];
        if (opt.texture_weight) out.weighted_contribution[winner] += opt.texture_weight->at(px, py);
      }
    }
  return out;
}

}  // namespace desksplat
