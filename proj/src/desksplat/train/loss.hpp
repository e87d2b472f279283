#pragma once

#include "desksplat/core/image.hpp"

namespace desksplat {

// Structural similarity between two images of identical shape, [0,1] data.
// The 11x11 Gaussian window (sigma 1.5) is only evaluated where it fits
// entirely inside the frame, i.e. the score is the mean over the interior
// (5 px border excluded) and over channels. Throws config_error on shape
// mismatch or if either dimension is smaller than the window.
double ssim(const Image& a, const Image& b);

// Same value; additionally writes dSSIM/da into *d_a (same shape as a).
double ssim_with_grad(const Image& a, const Image& b, Image* d_a);

struct LossResult {
  double loss = 0.0;  // (1 - lambda) * l1 + lambda * (1 - ssim) / 2
  double l1 = 0.0;    // mean absolute error over all pixels and channels
  double ssim = 0.0;
  Image d_render;     // dloss / drender, same shape as the rendered image
};

// Photometric training loss: L1 blended with structural dissimilarity.
LossResult compute_loss(const Image& render, const Image& gt,
                        double lambda_dssim);

}  // namespace desksplat
