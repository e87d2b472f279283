#include "desksplat/train/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace desksplat {

namespace {

constexpr double kShRestRateDivisor = 20.0;

}  // namespace

AdamOptimizer::AdamOptimizer(const OptimConfig& cfg, double scene_extent,
                             size_t n_splats)
    : cfg_(cfg), extent_(scene_extent), state_(n_splats) {
  const double rates[] = {cfg.lr_position_init, cfg.lr_position_final,
                          cfg.lr_sh,            cfg.lr_opacity,
                          cfg.lr_scale,         cfg.lr_rotation};
  for (double r : rates) {
    if (!(r > 0.0)) {
      throw config_error("optimizer: learning rates must be positive");
    }
  }
  if (cfg.lr_max_steps <= 0) {
    throw config_error("optimizer: lr_max_steps must be positive, got " +
                       std::to_string(cfg.lr_max_steps));
  }
  if (!(scene_extent > 0.0)) {
    throw config_error("optimizer: scene extent must be positive");
  }
}

double AdamOptimizer::position_lr(int iteration) const {
  const double t = std::clamp(
      static_cast<double>(iteration) / cfg_.lr_max_steps, 0.0, 1.0);
  const double log_lr = (1.0 - t) * std::log(cfg_.lr_position_init * extent_) +
                        t * std::log(cfg_.lr_position_final * extent_);
  return std::exp(log_lr);
}

void AdamOptimizer::step(Scene* scene, const std::vector<SplatGrads>& grads,
                         int iteration) {
  if (grads.size() != scene->splats.size() ||
      state_.size() != scene->splats.size()) {
    throw config_error("optimizer: state/gradient size mismatch (" +
                       std::to_string(state_.size()) + " state, " +
                       std::to_string(grads.size()) + " grads, " +
                       std::to_string(scene->splats.size()) + " splats)");
  }
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, t_);
  const double bc2 = 1.0 - std::pow(cfg_.beta2, t_);
  const double lr_pos = position_lr(iteration);

  const auto update = [&](double& p, double& m, double& v, double g,
                          double lr) {
    m = cfg_.beta1 * m + (1.0 - cfg_.beta1) * g;
    v = cfg_.beta2 * v + (1.0 - cfg_.beta2) * g * g;
    p -= lr * (m / bc1) / (std::sqrt(v / bc2) + cfg_.eps);
  };

  for (size_t i = 0; i < state_.size(); ++i) {
    GaussianSplat& s = scene->splats[i];
    const SplatGrads& g = grads[i];
    Moments& st = state_[i];
    for (int k = 0; k < 3; ++k) {
      update(s.mu[k], st.m_mu[k], st.v_mu[k], g.mu[k], lr_pos);
      update(s.log_scale[k], st.m_ls[k], st.v_ls[k], g.log_scale[k],
             cfg_.lr_scale);
    }
    for (int k = 0; k < 4; ++k) {
      update(s.rot[k], st.m_rot[k], st.v_rot[k], g.rot[k], cfg_.lr_rotation);
    }
    update(s.opacity, st.m_op, st.v_op, g.opacity, cfg_.lr_opacity);
    for (int j = 0; j < ShMat::RowsAtCompileTime; ++j) {
      const double lr = (j == 0) ? cfg_.lr_sh : cfg_.lr_sh / kShRestRateDivisor;
      for (int c = 0; c < 3; ++c) {
        update(s.sh(j, c), st.m_sh(j, c), st.v_sh(j, c), g.sh(j, c), lr);
      }
    }
    const double norm = s.rot.norm();
    if (norm > 1e-12) {
      s.rot /= norm;
    } else {
      s.rot = Vec4(1, 0, 0, 0);
    }
  }
}

void AdamOptimizer::remap(const std::vector<int>& old_index) {
  std::vector<Moments> next(old_index.size());
  for (size_t i = 0; i < old_index.size(); ++i) {
    const int src = old_index[i];
    if (src >= 0) {
      if (static_cast<size_t>(src) >= state_.size()) {
        throw config_error("optimizer: remap index " + std::to_string(src) +
                           " out of range (" + std::to_string(state_.size()) +
                           " slots)");
      }
      next[i] = state_[src];
    }
  }
  state_ = std::move(next);
}

}  // namespace desksplat
