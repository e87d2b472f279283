#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "desksplat/core/rng.hpp"
#include "desksplat/core/splat.hpp"

namespace desksplat {

struct ViewProjection {
  double depth = 0.0;  // camera-space z
  Vec2 pixel = Vec2::Zero();
};

// Pinhole projection of a world point; empty when behind the camera or the
// pixel lands outside the image.
std::optional<ViewProjection> project_to_view(const Vec3& mu, const CameraView& cam);

// Prior depth at the projection pixel (nearest-pixel lookup) divided by the
// projection depth. Empty when not visible or the prior is missing/invalid.
std::optional<double> depth_ratio(const Vec3& mu, const CameraView& cam);

struct VdrcCheck {
  double p = 0.0;
  bool keep = true;
};

// Relative depth-ratio change of a child against its parent, both measured
// on the parent's reference view. keep <=> p <= delta_p.
VdrcCheck vdrc_child(double parent_ratio, double child_ratio, double delta_p);

// Self-check of a parent against the ratio recorded at its creation view.
// Splats without bookkeeping (or currently invisible there) pass by default.
VdrcCheck vdrc_parent(const GaussianSplat& g, const std::vector<CameraView>& views,
                      double delta_p);

// Camera-frame prior normal at a pixel, rotated to world frame. Empty when
// out of bounds or the stored normal is invalid (zero).
std::optional<Vec3> world_normal_at(const CameraView& cam, const Vec2& pixel);

// Normalized scalar image gradient at a pixel; empty out of bounds or when
// the map is missing.
std::optional<double> gradient_at(const Image& grad_map, const Vec2& pixel);

// Child placement: perpendicular projection of the sampled position onto the
// parent's tangent plane, blended back toward the sample by the local texture
// gradient. grad 1 returns the sample bit-exactly, grad 0 the projection.
Vec3 guided_child_position(const Vec3& mu_parent, const Vec3& mu_sampled,
                           const Vec3& normal_world, double grad01);

// Draw from the parent's 3D Gaussian PDF: mu + R * diag(scale) * z.
Vec3 sample_from_pdf(const GaussianSplat& parent, Rng& rng);

struct DecisionRow {
  int iteration = 0;
  int splat_id = 0;
  char check = 'c';      // 'p' parent self-check, 'c' child check
  double s_hat = 0.0;    // weighted contribution area that triggered a split, if any
  double p = 0.0;        // relative ratio change (0 when unavailable)
  bool keep = true;
};

struct DecisionLog {
  std::vector<DecisionRow> rows;
  void append_csv(const std::string& path) const;  // creates with header if new
};

struct SplitContext {
  const std::vector<CameraView>* views = nullptr;
  uint64_t seed = 0;
  int iteration = 0;
  double delta_p = 0.1;
  double split_scale_divisor = 1.6;
  bool use_vdrc = true;
  bool use_normal_guide = true;
};

// Children of one (already parent-validated) splat. Discarded children are
// replaced by copies of the parent; survivors inherit the parent's reference
// view and their own depth ratio there.
std::vector<GaussianSplat> sample_children(const GaussianSplat& parent, int parent_id,
                                           int n, const SplitContext& ctx,
                                           double s_hat, DecisionLog* log);

// Strictly-greater update of each splat's best blend weight and its view.
void update_reference_view(Scene* scene, int view_index,
                           const std::vector<double>& per_splat_max_weight);

}  // namespace desksplat
