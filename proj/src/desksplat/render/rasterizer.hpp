#pragma once

#include <vector>

#include "desksplat/core/image.hpp"
#include "desksplat/render/projection.hpp"

namespace desksplat {

struct RenderOptions {
  int sh_degree = kMaxShDegree;
  int n_threads = 1;
  // Optional s_t map (same size as the view). When present, each pixel's
  // weight is credited to its max-contributor splat.
  const Image* texture_weight = nullptr;
};

struct RenderOutput {
  Image color;          // W x H x 3
  Image depth;          // blend-weighted camera z, normalized by total opacity
  Image transmittance;  // remaining T after compositing
  std::vector<int> index_max;                 // per pixel; -1 where nothing lands
  std::vector<double> per_splat_max_weight;   // best blend weight this view
  std::vector<int> contribution_count;        // pixels won as max contributor
  std::vector<double> weighted_contribution;  // texture-weight mass of those pixels

  int width = 0, height = 0;
  int index_at(int x, int y) const { return index_max[static_cast<size_t>(y) * width + x]; }
};

// Tile-based forward compositor.
RenderOutput render(const Scene& scene, const CameraView& cam, const RenderOptions& opt = {});

// Reference compositor: per pixel over a single globally sorted splat list,
// no tiling, no shared traversal code. Used to cross-check the tiled path.
RenderOutput render_brute_force(const Scene& scene, const CameraView& cam,
                                const RenderOptions& opt = {});

struct SplatGrads {
  Vec3 mu = Vec3::Zero();
  Vec4 rot = Vec4::Zero();
  Vec3 log_scale = Vec3::Zero();
  double opacity = 0.0;  // w.r.t. the stored pre-activation value
  ShMat sh = ShMat::Zero();
};

struct BackwardOutput {
  std::vector<SplatGrads> grads;       // one entry per scene splat
  std::vector<double> view_grad_norm;  // |d loss / d mu2d| scaled by (W/2, H/2)
  std::vector<char> projected;         // splat survived culling this view
};

// Gradients of a scalar loss with per-pixel color derivative `d_color`
// (W x H x 3). Re-runs the forward pass tile by tile instead of storing
// per-pixel contributor lists.
BackwardOutput render_backward(const Scene& scene, const CameraView& cam, const Image& d_color,
                               const RenderOptions& opt = {});

// Shared by the forward and backward passes.
std::vector<ProjectedSplat> project_scene(const Scene& scene, const CameraView& cam,
                                          const RenderOptions& opt);
void sort_by_depth(std::vector<int>* ids, const std::vector<ProjectedSplat>& proj);

}  // namespace desksplat
