#include "desksplat/train/loss.hpp"

#include "desksplat/core/common.hpp"

#include <array>
#include <cmath>
#include <vector>

namespace desksplat {

namespace {

constexpr int kWin = 11;
constexpr int kHalf = kWin / 2;
constexpr double kSsimSigma = 1.5;
constexpr double kSsimC1 = 1e-4;  // (0.01)^2 on [0,1] data
constexpr double kSsimC2 = 9e-4;  // (0.03)^2

const std::array<double, kWin>& gaussian_kernel() {
  static const std::array<double, kWin> kernel = [] {
    std::array<double, kWin> k{};
    double sum = 0.0;
    for (int i = 0; i < kWin; ++i) {
      const double d = i - kHalf;
      k[i] = std::exp(-d * d / (2.0 * kSsimSigma * kSsimSigma));
      sum += k[i];
    }
    for (double& v : k) v /= sum;
    return k;
  }();
  return kernel;
}

// Single-channel plane used for the filtering passes.
struct Plane {
  int w = 0, h = 0;
  std::vector<double> v;
  Plane() = default;
  Plane(int w_, int h_) : w(w_), h(h_), v(static_cast<size_t>(w_) * h_, 0.0) {}
  double& at(int x, int y) { return v[static_cast<size_t>(y) * w + x]; }
  double at(int x, int y) const { return v[static_cast<size_t>(y) * w + x]; }
};

// Separable filtering without padding: (w x h) -> (w-10 x h-10).
Plane filter_valid(const Plane& src, const std::array<double, kWin>& k) {
  Plane mid(src.w - 2 * kHalf, src.h);
  for (int y = 0; y < src.h; ++y) {
    for (int x = 0; x < mid.w; ++x) {
      double acc = 0.0;
      for (int i = 0; i < kWin; ++i) acc += k[i] * src.at(x + i, y);
      mid.at(x, y) = acc;
    }
  }
  Plane out(mid.w, src.h - 2 * kHalf);
  for (int y = 0; y < out.h; ++y) {
    for (int x = 0; x < out.w; ++x) {
      double acc = 0.0;
      for (int i = 0; i < kWin; ++i) acc += k[i] * mid.at(x, y + i);
      out.at(x, y) = acc;
    }
  }
  return out;
}

// Transpose of filter_valid: scatters an interior gradient back to w x h.
Plane filter_adjoint(const Plane& grad, int w, int h,
                     const std::array<double, kWin>& k) {
  Plane mid(grad.w, h);
  for (int y = 0; y < grad.h; ++y) {
    for (int x = 0; x < grad.w; ++x) {
      const double g = grad.at(x, y);
      for (int i = 0; i < kWin; ++i) mid.at(x, y + i) += k[i] * g;
    }
  }
  Plane out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < mid.w; ++x) {
      const double g = mid.at(x, y);
      for (int i = 0; i < kWin; ++i) out.at(x + i, y) += k[i] * g;
    }
  }
  return out;
}

void check_shapes(const Image& a, const Image& b, const char* who) {
  if (a.width != b.width || a.height != b.height || a.channels != b.channels) {
    throw config_error(std::string(who) + ": image shapes differ (" +
                       std::to_string(a.width) + "x" + std::to_string(a.height) +
                       "x" + std::to_string(a.channels) + " vs " +
                       std::to_string(b.width) + "x" + std::to_string(b.height) +
                       "x" + std::to_string(b.channels) + ")");
  }
}

double ssim_impl(const Image& a, const Image& b, Image* d_a) {
  check_shapes(a, b, "ssim");
  if (a.width < kWin || a.height < kWin) {
    throw config_error("ssim: image " + std::to_string(a.width) + "x" +
                       std::to_string(a.height) +
                       " is smaller than the 11x11 filter window");
  }
  const auto& k = gaussian_kernel();
  const int vw = a.width - 2 * kHalf;
  const int vh = a.height - 2 * kHalf;
  const double n = static_cast<double>(vw) * vh * a.channels;
  if (d_a) *d_a = Image(a.width, a.height, a.channels, 0.0);

  double total = 0.0;
  for (int c = 0; c < a.channels; ++c) {
    Plane x(a.width, a.height), y(a.width, a.height);
    Plane xx(a.width, a.height), yy(a.width, a.height), xy(a.width, a.height);
    for (int py = 0; py < a.height; ++py) {
      for (int px = 0; px < a.width; ++px) {
        const double va = a.at(px, py, c);
        const double vb = b.at(px, py, c);
        x.at(px, py) = va;
        y.at(px, py) = vb;
        xx.at(px, py) = va * va;
        yy.at(px, py) = vb * vb;
        xy.at(px, py) = va * vb;
      }
    }
    const Plane mu_x = filter_valid(x, k);
    const Plane mu_y = filter_valid(y, k);
    const Plane m_xx = filter_valid(xx, k);
    const Plane m_yy = filter_valid(yy, k);
    const Plane m_xy = filter_valid(xy, k);

    // Gradients of the per-window score w.r.t. mu_x, m_xx, m_xy.
    Plane g_mu(vw, vh), g_xx(vw, vh), g_xy(vw, vh);
    for (int py = 0; py < vh; ++py) {
      for (int px = 0; px < vw; ++px) {
        const double mx = mu_x.at(px, py);
        const double my = mu_y.at(px, py);
        const double sig_x2 = m_xx.at(px, py) - mx * mx;
        const double sig_y2 = m_yy.at(px, py) - my * my;
        const double sig_xy = m_xy.at(px, py) - mx * my;
        const double a1 = 2.0 * mx * my + kSsimC1;
        const double a2 = 2.0 * sig_xy + kSsimC2;
        const double b1 = mx * mx + my * my + kSsimC1;
        const double b2 = sig_x2 + sig_y2 + kSsimC2;
        const double s = (a1 * a2) / (b1 * b2);
        total += s;
        if (d_a) {
          const double ds_da1 = a2 / (b1 * b2);
          const double ds_da2 = a1 / (b1 * b2);
          const double ds_db1 = -s / b1;
          const double ds_db2 = -s / b2;
          g_mu.at(px, py) = 2.0 * my * ds_da1 - 2.0 * my * ds_da2 +
                            2.0 * mx * ds_db1 - 2.0 * mx * ds_db2;
          g_xx.at(px, py) = ds_db2;
          g_xy.at(px, py) = 2.0 * ds_da2;
        }
      }
    }
    if (d_a) {
      const Plane adj_mu = filter_adjoint(g_mu, a.width, a.height, k);
      const Plane adj_xx = filter_adjoint(g_xx, a.width, a.height, k);
      const Plane adj_xy = filter_adjoint(g_xy, a.width, a.height, k);
      for (int py = 0; py < a.height; ++py) {
        for (int px = 0; px < a.width; ++px) {
          d_a->at(px, py, c) =
              (adj_mu.at(px, py) + 2.0 * x.at(px, py) * adj_xx.at(px, py) +
               y.at(px, py) * adj_xy.at(px, py)) /
              n;
        }
      }
    }
  }
  return total / n;
}

}  // namespace

double ssim(const Image& a, const Image& b) { return ssim_impl(a, b, nullptr); }

double ssim_with_grad(const Image& a, const Image& b, Image* d_a) {
  return ssim_impl(a, b, d_a);
}

LossResult compute_loss(const Image& render, const Image& gt,
                        double lambda_dssim) {
  check_shapes(render, gt, "compute_loss");
  if (lambda_dssim < 0.0 || lambda_dssim > 1.0) {
    throw config_error("compute_loss: lambda_dssim must lie in [0, 1], got " +
                       std::to_string(lambda_dssim));
  }
  LossResult r;
  r.d_render = Image(render.width, render.height, render.channels, 0.0);

  const size_t n = render.data.size();
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double d = render.data[i] - gt.data[i];
    acc += std::abs(d);
    const double sign = (d > 0.0) ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
    r.d_render.data[i] = (1.0 - lambda_dssim) * sign / static_cast<double>(n);
  }
  r.l1 = acc / static_cast<double>(n);

  if (lambda_dssim > 0.0) {
    Image d_ssim_map;
    r.ssim = ssim_with_grad(render, gt, &d_ssim_map);
    for (size_t i = 0; i < n; ++i) {
      r.d_render.data[i] += -0.5 * lambda_dssim * d_ssim_map.data[i];
    }
  } else {
    r.ssim = ssim(render, gt);
  }
  r.loss = (1.0 - lambda_dssim) * r.l1 + lambda_dssim * (1.0 - r.ssim) / 2.0;
  return r;
}

}  // namespace desksplat
