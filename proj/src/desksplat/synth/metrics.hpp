#pragma once

#include <string>
#include <vector>

#include "desksplat/core/common.hpp"
#include "desksplat/core/image.hpp"

namespace desksplat {

// Peak signal-to-noise ratio in dB over [0,1] images, mean squared error over
// all pixels and channels. Identical images report 99 dB instead of infinity.
double psnr(const Image& a, const Image& b);

// One finite face of a ground-truth surface: a rectangle spanned by two edge
// vectors from an origin corner (normal = e0 x e1, normalized).
struct SurfaceFace {
  Vec3 origin = Vec3::Zero();
  Vec3 edge0 = Vec3::Zero();
  Vec3 edge1 = Vec3::Zero();
};

// Distance from a point to the nearest point on one bounded rectangle
// (beyond an edge the distance is to the rim, not the supporting plane).
double distance_to_face(const Vec3& p, const SurfaceFace& face);

// Minimum of distance_to_face over all faces.
double distance_to_surfaces(const Vec3& p, const std::vector<SurfaceFace>& faces);

struct SurfaceFitStats {
  double mean = 0.0;
  double median = 0.0;
  double p95 = 0.0;
  double fraction_above = 0.0;  // share of points farther than the tolerance
  size_t count = 0;
};

// Splat-center-to-geometry residuals against the ground-truth faces.
SurfaceFitStats surface_fit_error(const std::vector<Vec3>& points,
                                  const std::vector<SurfaceFace>& faces,
                                  double tolerance);

// Splats-per-area contrast between two labelled regions:
// (n_textured / area_textured) / (n_textureless / area_textureless).
// Returns +infinity when the textureless region is empty but the textured
// one is not, and 1 when both are empty.
double density_ratio(size_t n_textured, double area_textured,
                     size_t n_textureless, double area_textureless);

}  // namespace desksplat
