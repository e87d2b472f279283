#include <algorithm>
#include <cmath>

#include "desksplat/core/parallel.hpp"
#include "desksplat/render/rasterizer.hpp"

namespace desksplat {

namespace {

// Pixel-space gradient sums for one projected splat.
struct PixelAccum {
  Vec3 d_color = Vec3::Zero();
  Vec2 d_mu2d = Vec2::Zero();
  Mat2 d_cov = Mat2::Zero();  // w.r.t. the dilated 2D covariance
  double d_alpha = 0.0;       // w.r.t. the activated opacity

  void add(const PixelAccum& o) {
    d_color += o.d_color;
    d_mu2d += o.d_mu2d;
    d_cov += o.d_cov;
    d_alpha += o.d_alpha;
  }
};

struct Contributor {
  int idx = 0;
  double w = 0.0;  // blend weight (after the cap)
  double t = 0.0;  // transmittance in front of this splat
  bool capped = false;
};

// d R(q) / d q for a unit quaternion (w, x, y, z), contracted with d_rmat.
Vec4 quat_rotation_backward(const Vec4& q, const Mat3& d_rmat) {
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  Mat3 dw, dx, dy, dz;
  dw << 0, -z, y, z, 0, -x, -y, x, 0;
  dx << 0, y, z, y, -2 * x, -w, z, w, -2 * x;
  dy << -2 * y, x, w, x, 0, z, -w, z, -2 * y;
  dz << -2 * z, -w, x, w, -2 * z, y, x, y, 0;
  return 2.0 * Vec4(d_rmat.cwiseProduct(dw).sum(), d_rmat.cwiseProduct(dx).sum(),
                    d_rmat.cwiseProduct(dy).sum(), d_rmat.cwiseProduct(dz).sum());
}

}  // namespace

BackwardOutput render_backward(const Scene& scene, const CameraView& cam, const Image& d_color,
                               const RenderOptions& opt) {
  const int w_img = cam.width, h_img = cam.height;
  const int n = static_cast<int>(scene.splats.size());
  BackwardOutput out;
  out.grads.assign(n, SplatGrads{});
  out.view_grad_norm.assign(n, 0.0);
  out.projected.assign(n, 0);

  const std::vector<ProjectedSplat> proj = project_scene(scene, cam, opt);
  const int n_proj = static_cast<int>(proj.size());
  if (n_proj == 0) return out;

  const int tiles_x = (w_img + kTileSize - 1) / kTileSize;
  const int tiles_y = (h_img + kTileSize - 1) / kTileSize;
  std::vector<std::vector<int>> tile_lists(static_cast<size_t>(tiles_x) * tiles_y);
  for (int i = 0; i < n_proj; ++i) {
    const ProjectedSplat& ps = proj[i];
    for (int ty = ps.y_min / kTileSize; ty <= ps.y_max / kTileSize; ++ty)
      for (int tx = ps.x_min / kTileSize; tx <= ps.x_max / kTileSize; ++tx)
        tile_lists[static_cast<size_t>(ty) * tiles_x + tx].push_back(i);
  }

  const int n_threads = std::max(1, opt.n_threads);
  std::vector<std::vector<PixelAccum>> thr_accum(n_threads,
                                                 std::vector<PixelAccum>(n_proj));

  parallel_chunks(tile_lists.size(), n_threads, [&](size_t begin, size_t end, int thread) {
    std::vector<PixelAccum>& acc = thr_accum[thread];
    std::vector<Contributor> contribs;
    for (size_t tile = begin; tile < end; ++tile) {
      std::vector<int>& order = tile_lists[tile];
      sort_by_depth(&order, proj);
      const int tx = static_cast<int>(tile) % tiles_x;
      const int ty = static_cast<int>(tile) / tiles_x;
      const int x1 = std::min(w_img, (tx + 1) * kTileSize);
      const int y1 = std::min(h_img, (ty + 1) * kTileSize);
      for (int py = ty * kTileSize; py < y1; ++py)
        for (int px = tx * kTileSize; px < x1; ++px) {
          // Replay the forward pass to recover (w, T) per contributor.
          contribs.clear();
          double t = 1.0;
          for (const int idx : order) {
            const ProjectedSplat& ps = proj[idx];
            if (!ps.in_rect(px, py)) continue;
            const Vec2 d(px + 0.5 - ps.mu2d.x(), py + 0.5 - ps.mu2d.y());
            const double q = d.dot(ps.inv_cov2d * d);
            const double w_raw = ps.alpha * std::exp(-0.5 * q);
            const bool capped = w_raw > kBlendWeightCap;
            const double w = capped ? kBlendWeightCap : w_raw;
            const double t_next = t * (1.0 - w);
            if (t_next < kTransmittanceCutoff) break;
            contribs.push_back({idx, w, t, capped});
            t = t_next;
          }
          if (contribs.empty()) continue;
          const Vec3 dc(d_color.at(px, py, 0), d_color.at(px, py, 1),
                        d_color.at(px, py, 2));
          // Walk back to front; `behind` folds the derivative of every later
          // splat's transmittance into this one's weight gradient.
          Vec3 behind = Vec3::Zero();
          for (int k = static_cast<int>(contribs.size()) - 1; k >= 0; --k) {
            const Contributor& c = contribs[k];
            const ProjectedSplat& ps = proj[c.idx];
            PixelAccum& a = acc[c.idx];
            a.d_color += dc * (c.w * c.t);
            const double d_weight = dc.dot(ps.color * c.t - behind / (1.0 - c.w));
            behind += ps.color * (c.w * c.t);
            if (c.capped) continue;  // flat region of the weight cap
            const double g = c.w / ps.alpha;  // Gaussian falloff
            a.d_alpha += d_weight * g;
            const Vec2 d(px + 0.5 - ps.mu2d.x(), py + 0.5 - ps.mu2d.y());
            const Vec2 ad = ps.inv_cov2d * d;
            a.d_mu2d += (c.w * d_weight) * ad;
            a.d_cov += (0.5 * c.w * d_weight) * (ad * ad.transpose());
          }
        }
    }
  });

  std::vector<PixelAccum> accum(n_proj);
  for (int t = 0; t < n_threads; ++t)
    for (int i = 0; i < n_proj; ++i) accum[i].add(thr_accum[t][i]);

  // Pixel-space sums -> parameter gradients, one splat at a time.
  parallel_chunks(n_proj, n_threads, [&](size_t begin, size_t end, int) {
    for (size_t i = begin; i < end; ++i) {
      const ProjectedSplat& ps = proj[i];
      const PixelAccum& a = accum[i];
      const GaussianSplat& g = scene.splats[ps.splat_id];
      SplatGrads& gr = out.grads[ps.splat_id];
      out.projected[ps.splat_id] = 1;
      out.view_grad_norm[ps.splat_id] =
          std::hypot(a.d_mu2d.x() * w_img / 2.0, a.d_mu2d.y() * h_img / 2.0);

      gr.opacity = a.d_alpha * ps.alpha * (1.0 - ps.alpha);

      Vec3 d_dir = Vec3::Zero();
      eval_sh_backward(g.sh, opt.sh_degree, ps.viewdir, ps.clamped, a.d_color, &gr.sh,
                       &d_dir);
      Vec3 d_mu = (Mat3::Identity() - ps.viewdir * ps.viewdir.transpose()) * d_dir /
                  ps.view_dist;

      // 2D covariance -> 3D covariance and camera-space position.
      const Mat3 sigma = build_covariance(g.rot, g.scale());
      const Mat3 d_sigma = ps.M.transpose() * a.d_cov * ps.M;
      const Mat23 d_m = 2.0 * a.d_cov * ps.M * sigma;
      const Mat23 d_jac = d_m * cam.rotation.transpose();
      const Vec3 p = ps.p_cam;
      const double iz = 1.0 / p.z(), iz2 = iz * iz, iz3 = iz2 * iz;
      Vec3 d_pcam(d_jac(0, 2) * (-cam.fu * iz2), d_jac(1, 2) * (-cam.fv * iz2),
                  d_jac(0, 0) * (-cam.fu * iz2) + d_jac(1, 1) * (-cam.fv * iz2) +
                      d_jac(0, 2) * (2.0 * cam.fu * p.x() * iz3) +
                      d_jac(1, 2) * (2.0 * cam.fv * p.y() * iz3));
      d_pcam += projection_jacobian(p, cam).transpose() * a.d_mu2d;
      d_mu += cam.rotation.transpose() * d_pcam;
      gr.mu = d_mu;

      // 3D covariance -> rotation and log-scale.
      const Vec3 s = g.scale();
      const Mat3 rq = quat_to_matrix(g.rot);
      const Mat3 b = rq * s.asDiagonal();
      const Mat3 d_b = 2.0 * d_sigma * b;
      gr.log_scale = (rq.transpose() * d_b).diagonal().cwiseProduct(s);
      const Mat3 d_rmat = d_b * s.asDiagonal();
      const double qlen = g.rot.norm();
      const Vec4 qn = g.rot / qlen;
      const Vec4 d_qn = quat_rotation_backward(qn, d_rmat);
      gr.rot = (d_qn - qn * qn.dot(d_qn)) / qlen;
    }
  });
  return out;
}

}  // namespace desksplat
