#pragma once

#include <limits>
#include <string>
#include <vector>

#include "desksplat/core/common.hpp"
#include "desksplat/core/image.hpp"
#include "desksplat/core/sh.hpp"

namespace desksplat {

constexpr int kNoView = -1;
constexpr double kUnsetRatio = -1.0;  // init_depth_ratio sentinel (valid ratios are > 0)

struct GaussianSplat {
  Vec3 mu = Vec3::Zero();
  Vec4 rot = Vec4(1, 0, 0, 0);       // quaternion (w, x, y, z), kept unit
  Vec3 log_scale = Vec3::Zero();     // per-axis stddev, log-space
  double opacity = 0.0;              // pre-activation (logistic)
  ShMat sh = ShMat::Zero();

  // Densification bookkeeping.
  int ref_view = kNoView;            // view of current best blend weight
  double max_weight = 0.0;
  int init_ref_view = kNoView;       // reference view fixed at creation
  double init_depth_ratio = kUnsetRatio;

  Vec3 scale() const { return log_scale.array().exp(); }
  double alpha() const { return sigmoid(opacity); }
  bool has_init_ratio() const { return init_ref_view != kNoView && init_depth_ratio > 0.0; }
};

struct CameraView {
  int id = kNoView;
  std::string name;
  int width = 0, height = 0;
  double fu = 0, fv = 0, cu = 0, cv = 0;
  Mat3 rotation = Mat3::Identity();  // world-to-camera
  Vec3 translation = Vec3::Zero();   // p_cam = rotation * p_world + translation

  Image image;          // RGB in [0,1]
  Image depth_prior;    // 1 channel; <= 0 marks invalid; empty if absent
  Image normal_prior;   // 3 channels, camera-frame unit vectors; empty if absent
  Image gradient;       // 1 channel, normalized image gradient; filled by the trainer
  Image texture_weight; // 1 channel, s_t in [0,1]; filled by the trainer

  Vec3 to_camera(const Vec3& p_world) const { return rotation * p_world + translation; }
  Vec3 camera_center() const { return -(rotation.transpose() * translation); }
  bool has_depth_prior() const { return !depth_prior.empty(); }
  bool has_normal_prior() const { return !normal_prior.empty(); }
  bool depth_valid(int x, int y) const {
    const double d = depth_prior.at(x, y);
    return std::isfinite(d) && d > 0.0;
  }
};

struct Scene {
  std::vector<GaussianSplat> splats;
  int iteration = 0;
};

// Rotation matrix of a (not necessarily unit) quaternion; normalizes first.
Mat3 quat_to_matrix(const Vec4& q);

// Sigma = R * S * S^T * R^T for stddev scales (not log-space).
Mat3 build_covariance(const Vec4& rot, const Vec3& scale);

// Mean distance to the 3 nearest neighbors, for every point. Entries for
// scenes with fewer than 4 points are <= 0 (caller applies the fallback).
std::vector<double> mean_knn_distance(const std::vector<Vec3>& points, int k = 3);

// Isotropic splat in the original-3DGS initialization convention.
// mean_nn_dist <= 0 selects the fallback scale.
GaussianSplat splat_from_sfm_point(const Vec3& position, const Vec3& color,
                                   double mean_nn_dist, double fallback_scale = 0.01);

}  // namespace desksplat
