#pragma once

#include <vector>

#include "desksplat/core/image.hpp"
#include "desksplat/render/rasterizer.hpp"

namespace desksplat {

constexpr double kTexAlpha = 20.0;   // sigmoid steepness
constexpr double kTexBeta = 0.16;    // gradient value mapped to weight 0.5
constexpr double kAreaThresholdStart = 40.0;
constexpr double kAreaThresholdEnd = 4.0;

// Rec. 601 luminance -> 3x3 Sobel magnitude / 4 (the operator's maximum
// axis response), clamped to [0,1]. Borders replicate. Accepts 1 or 3
// channel input.
Image gradient_map(const Image& image);

// (tanh(alpha*(grad - beta)) + 1) / 2.
double texture_weight(double grad, double alpha = kTexAlpha, double beta = kTexBeta);
Image texture_weight_map(const Image& grad, double alpha = kTexAlpha, double beta = kTexBeta);

// Linear ramp from start at iteration l_s down to end at l_e, clamped outside.
double adaptive_threshold(int l, int l_s, int l_e, double start = kAreaThresholdStart,
                          double end = kAreaThresholdEnd);

// Pure-map form of the weighted contribution the rasterizer accumulates:
// per splat, the sum of weight over pixels it wins as max contributor.
std::vector<double> weighted_contribution(const std::vector<int>& index_max,
                                          const Image& weight, int n_splats);

// Ids whose weighted area strictly exceeds the threshold.
std::vector<int> select_blur_splats(const std::vector<double>& weighted_area,
                                    double threshold);

// Per-splat observation window between densification steps.
struct DensifyStats {
  std::vector<double> max_weighted_area;  // max per-view weighted contribution
  std::vector<double> grad_accum;         // summed screen-space gradient norms
  std::vector<Vec3> grad3d_accum;         // summed world-space position gradients
  std::vector<int> denom;                 // renders where the splat projected

  void resize(size_t n);
  void observe_render(const RenderOutput& out);
  void observe_backward(const BackwardOutput& out);
  void reset();
};

}  // namespace desksplat
