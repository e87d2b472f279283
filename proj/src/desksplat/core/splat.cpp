#include "desksplat/core/splat.hpp"

#include <algorithm>
#include <cmath>

namespace desksplat {

Mat3 quat_to_matrix(const Vec4& q) {
  const double n = q.norm();
  if (!(n > 0.0) || !std::isfinite(n))
    throw config_error("quat_to_matrix: degenerate quaternion");
  const double w = q[0] / n, x = q[1] / n, y = q[2] / n, z = q[3] / n;
  Mat3 r;
  r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
      2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
      2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return r;
}

Mat3 build_covariance(const Vec4& rot, const Vec3& scale) {
  if (!rot.allFinite() || !scale.allFinite())
    throw config_error("build_covariance: non-finite input");
  if (!(scale.minCoeff() > 0.0))
    throw config_error("build_covariance: scales must be positive");
  const Mat3 r = quat_to_matrix(rot);
  const Mat3 m = r * scale.asDiagonal();
  return m * m.transpose();
}

std::vector<double> mean_knn_distance(const std::vector<Vec3>& points, int k) {
  const int n = static_cast<int>(points.size());
  std::vector<double> out(n, 0.0);
  if (n <= k) return out;  // all <= 0: fallback
  std::vector<double> d2(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) d2[j] = (points[j] - points[i]).squaredNorm();
    d2[i] = std::numeric_limits<double>::infinity();
    std::nth_element(d2.begin(), d2.begin() + (k - 1), d2.end());
    double sum = 0.0;
    for (int j = 0; j < k; ++j) sum += std::sqrt(d2[j]);
    out[i] = sum / k;
  }
  return out;
}

GaussianSplat splat_from_sfm_point(const Vec3& position, const Vec3& color,
                                   double mean_nn_dist, double fallback_scale) {
  if (!position.allFinite())
    throw config_error("splat_from_sfm_point: non-finite position");
  GaussianSplat g;
  g.mu = position;
  const double s = mean_nn_dist > 0.0 ? mean_nn_dist : fallback_scale;
  g.log_scale.setConstant(std::log(s));
  g.opacity = logit(0.1);
  for (int ch = 0; ch < 3; ++ch) g.sh(0, ch) = (color[ch] - 0.5) / kSh0;
  return g;
}

}  // namespace desksplat
