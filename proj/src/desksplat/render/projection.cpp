#include "desksplat/render/projection.hpp"

#include <cmath>

namespace desksplat {

Mat23 projection_jacobian(const Vec3& p_cam, const CameraView& cam) {
  const double iz = 1.0 / p_cam.z();
  const double iz2 = iz * iz;
  Mat23 j;
  j << cam.fu * iz, 0.0, -cam.fu * p_cam.x() * iz2,  //
      0.0, cam.fv * iz, -cam.fv * p_cam.y() * iz2;
  return j;
}

std::optional<ProjectedSplat> project_splat(const GaussianSplat& g, int splat_id,
                                            const CameraView& cam, int sh_degree) {
  const Vec3 p = cam.to_camera(g.mu);
  if (!(p.z() >= kNearPlane)) return std::nullopt;

  ProjectedSplat out;
  out.splat_id = splat_id;
  out.p_cam = p;
  out.depth = p.z();
  out.mu2d = Vec2(cam.fu * p.x() / p.z() + cam.cu, cam.fv * p.y() / p.z() + cam.cv);

  out.M = projection_jacobian(p, cam) * cam.rotation;
  Mat2 cov = out.M * build_covariance(g.rot, g.scale()) * out.M.transpose();
  cov(0, 0) += kCovLowPass;
  cov(1, 1) += kCovLowPass;
  out.cov2d = cov;
  const double det = cov(0, 0) * cov(1, 1) - cov(0, 1) * cov(1, 0);
  // PSD before dilation, so det >= lowpass * trace + lowpass^2 > 0 always.
  out.inv_cov2d << cov(1, 1) / det, -cov(0, 1) / det, -cov(1, 0) / det, cov(0, 0) / det;

  const double mid = 0.5 * (cov(0, 0) + cov(1, 1));
  const double lambda_max = mid + std::sqrt(std::max(0.0, mid * mid - det));
  out.radius = std::ceil(3.0 * std::sqrt(lambda_max));

  // Pixel x contributes iff its center x+0.5 lies within [mu-r, mu+r].
  out.x_min = std::max(0, static_cast<int>(std::ceil(out.mu2d.x() - out.radius - 0.5)));
  out.x_max =
      std::min(cam.width - 1, static_cast<int>(std::floor(out.mu2d.x() + out.radius - 0.5)));
  out.y_min = std::max(0, static_cast<int>(std::ceil(out.mu2d.y() - out.radius - 0.5)));
  out.y_max =
      std::min(cam.height - 1, static_cast<int>(std::floor(out.mu2d.y() + out.radius - 0.5)));
  if (out.x_min > out.x_max || out.y_min > out.y_max) return std::nullopt;

  out.alpha = g.alpha();

  const Vec3 offset = g.mu - cam.camera_center();
  out.view_dist = offset.norm();
  out.viewdir = out.view_dist > 0.0 ? Vec3(offset / out.view_dist) : Vec3(0, 0, 1);
  const ShEval ev = eval_sh(g.sh, sh_degree, out.viewdir);
  out.color = ev.rgb;
  out.clamped = ev.clamped;
  return out;
}

}  // namespace desksplat
