#pragma once

#include <optional>

#include "desksplat/core/splat.hpp"

namespace desksplat {

constexpr double kNearPlane = 0.01;
constexpr double kCovLowPass = 0.3;        // px^2 added to the 2D covariance diagonal
constexpr double kBlendWeightCap = 0.99;
constexpr double kTransmittanceCutoff = 1e-4;
constexpr int kTileSize = 16;

// A splat flattened onto one view, with everything the compositor and the
// backward chain need cached. Footprint bounds are inclusive integer pixel
// ranges; the same bounds gate contribution in every compositing path.
struct ProjectedSplat {
  int splat_id = -1;
  Vec2 mu2d = Vec2::Zero();
  Mat2 cov2d = Mat2::Zero();      // after the low-pass dilation
  Mat2 inv_cov2d = Mat2::Zero();
  double depth = 0.0;             // camera-space z
  double radius = 0.0;            // 3-sigma extent, pixels
  int x_min = 0, x_max = -1;
  int y_min = 0, y_max = -1;
  double alpha = 0.0;             // activated opacity
  Vec3 color = Vec3::Zero();
  std::array<bool, 3> clamped{};  // color channels pinned at 0

  // Cached intermediates for the backward chain.
  Vec3 p_cam = Vec3::Zero();
  Mat23 M = Mat23::Zero();        // J * R (projection Jacobian times world-to-camera)
  Vec3 viewdir = Vec3::Zero();    // unit, camera center -> splat
  double view_dist = 0.0;

  bool in_rect(int px, int py) const {
    return px >= x_min && px <= x_max && py >= y_min && py <= y_max;
  }
};

// Perspective Jacobian at a camera-space point.
Mat23 projection_jacobian(const Vec3& p_cam, const CameraView& cam);

// Empty when the splat is closer than the near plane or its 3-sigma footprint
// misses every pixel center.
std::optional<ProjectedSplat> project_splat(const GaussianSplat& g, int splat_id,
                                            const CameraView& cam, int sh_degree);

}  // namespace desksplat
