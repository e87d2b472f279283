#include "desksplat/densify/texture.hpp"

#include <algorithm>
#include <cmath>

namespace desksplat {

namespace {

double luma_at(const Image& img, int x, int y) {
  x = std::clamp(x, 0, img.width - 1);  // replicate border
  y = std::clamp(y, 0, img.height - 1);
  if (img.channels == 1) return img.at(x, y);
  return 0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) + 0.114 * img.at(x, y, 2);
}

}  // namespace

Image gradient_map(const Image& image) {
  if (image.channels != 1 && image.channels != 3)
    throw config_error("gradient_map: expected 1 or 3 channels");
  Image out(image.width, image.height, 1);
  for (int y = 0; y < image.height; ++y)
    for (int x = 0; x < image.width; ++x) {
      const double tl = luma_at(image, x - 1, y - 1), tc = luma_at(image, x, y - 1),
                   tr = luma_at(image, x + 1, y - 1);
      const double ml = luma_at(image, x - 1, y), mr = luma_at(image, x + 1, y);
      const double bl = luma_at(image, x - 1, y + 1), bc = luma_at(image, x, y + 1),
                   br = luma_at(image, x + 1, y + 1);
      const double gx = (tr + 2.0 * mr + br) - (tl + 2.0 * ml + bl);
      const double gy = (bl + 2.0 * bc + br) - (tl + 2.0 * tc + tr);
      out.at(x, y) = std::min(1.0, std::sqrt(gx * gx + gy * gy) / 4.0);
    }
  return out;
}

double texture_weight(double grad, double alpha, double beta) {
  return (std::tanh(alpha * (grad - beta)) + 1.0) / 2.0;
}

Image texture_weight_map(const Image& grad, double alpha, double beta) {
  Image out = grad;
  for (auto& v : out.data) v = texture_weight(v, alpha, beta);
  return out;
}

double adaptive_threshold(int l, int l_s, int l_e, double start, double end) {
  if (l_s >= l_e) throw config_error("adaptive_threshold: window start must precede end");
  if (l <= l_s) return start;
  if (l >= l_e) return end;
  return start + (end - start) * static_cast<double>(l - l_s) / (l_e - l_s);
}

std::vector<double> weighted_contribution(const std::vector<int>& index_max,
                                          const Image& weight, int n_splats) {
  if (index_max.size() != weight.data.size())
    throw config_error("weighted_contribution: map sizes differ");
  std::vector<double> out(n_splats, 0.0);
  for (size_t i = 0; i < index_max.size(); ++i) {
    const int idx = index_max[i];
    if (idx >= 0 && idx < n_splats) out[idx] += weight.data[i];
  }
  return out;
}

std::vector<int> select_blur_splats(const std::vector<double>& weighted_area,
                                    double threshold) {
  std::vector<int> out;
  for (size_t i = 0; i < weighted_area.size(); ++i)
    if (weighted_area[i] > threshold) out.push_back(static_cast<int>(i));
  return out;
}

void DensifyStats::resize(size_t n) {
  max_weighted_area.assign(n, 0.0);
  grad_accum.assign(n, 0.0);
  grad3d_accum.assign(n, Vec3::Zero());
  denom.assign(n, 0);
}

void DensifyStats::observe_render(const RenderOutput& out) {
  for (size_t i = 0; i < max_weighted_area.size(); ++i)
    max_weighted_area[i] = std::max(max_weighted_area[i], out.weighted_contribution[i]);
}

void DensifyStats::observe_backward(const BackwardOutput& out) {
  for (size_t i = 0; i < grad_accum.size(); ++i) {
    grad_accum[i] += out.view_grad_norm[i];
    grad3d_accum[i] += out.grads[i].mu;
    denom[i] += out.projected[i];
  }
}

void DensifyStats::reset() { resize(max_weighted_area.size()); }

}  // namespace desksplat
