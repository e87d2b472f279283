#pragma once

#include <cstddef>
#include <vector>

#include "desksplat/core/splat.hpp"
#include "desksplat/render/rasterizer.hpp"

namespace desksplat {

struct OptimConfig {
  // Positions decay exponentially from init to final over lr_max_steps;
  // both ends are scaled by the scene extent so step sizes track scene units.
  double lr_position_init = 1.6e-4;
  double lr_position_final = 1.6e-6;
  int lr_max_steps = 0;  // 0: caller substitutes the run length
  double lr_sh = 2.5e-3;  // band 0; higher-order bands step at 1/20 of this
  double lr_opacity = 0.05;
  double lr_scale = 5e-3;
  double lr_rotation = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-15;
};

// Adaptive-moment optimizer over all splat parameters, one learning rate per
// parameter class. Moment state lives side by side with the scene and is
// remapped through densify results so surviving splats keep their history.
class AdamOptimizer {
 public:
  AdamOptimizer(const OptimConfig& cfg, double scene_extent, size_t n_splats);

  // Position learning rate at an absolute iteration (log-linear decay).
  double position_lr(int iteration) const;

  // One update over every splat; grads.size() must match the scene.
  // Quaternions are renormalized after the step.
  void step(Scene* scene, const std::vector<SplatGrads>& grads, int iteration);

  // Rebuild state after densification: old_index[i] names the splat whose
  // moments the new slot i inherits, -1 starts fresh.
  void remap(const std::vector<int>& old_index);

  size_t size() const { return state_.size(); }
  int steps_taken() const { return t_; }

 private:
  struct Moments {
    Vec3 m_mu = Vec3::Zero(), v_mu = Vec3::Zero();
    Vec4 m_rot = Vec4::Zero(), v_rot = Vec4::Zero();
    Vec3 m_ls = Vec3::Zero(), v_ls = Vec3::Zero();
    double m_op = 0.0, v_op = 0.0;
    ShMat m_sh = ShMat::Zero(), v_sh = ShMat::Zero();
  };

  OptimConfig cfg_;
  double extent_;
  int t_ = 0;  // shared step count (bias correction), survives remaps
  std::vector<Moments> state_;
};

}  // namespace desksplat
