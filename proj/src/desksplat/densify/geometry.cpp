#include "desksplat/densify/geometry.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

namespace desksplat {

std::optional<ViewProjection> project_to_view(const Vec3& mu, const CameraView& cam) {
  const Vec3 p = cam.to_camera(mu);
  if (!(p.z() > 0.0)) return std::nullopt;
  ViewProjection out;
  out.depth = p.z();
  out.pixel = Vec2(cam.fu * p.x() / p.z() + cam.cu, cam.fv * p.y() / p.z() + cam.cv);
  if (out.pixel.x() < 0.0 || out.pixel.x() >= cam.width || out.pixel.y() < 0.0 ||
      out.pixel.y() >= cam.height)
    return std::nullopt;
  return out;
}

std::optional<double> depth_ratio(const Vec3& mu, const CameraView& cam) {
  if (!cam.has_depth_prior()) return std::nullopt;
  const auto proj = project_to_view(mu, cam);
  if (!proj) return std::nullopt;
  const int x = static_cast<int>(std::floor(proj->pixel.x()));
  const int y = static_cast<int>(std::floor(proj->pixel.y()));
  if (!cam.depth_prior.contains(x, y) || !cam.depth_valid(x, y)) return std::nullopt;
  return cam.depth_prior.at(x, y) / proj->depth;
}

VdrcCheck vdrc_child(double parent_ratio, double child_ratio, double delta_p) {
  VdrcCheck out;
  out.p = std::abs(parent_ratio - child_ratio) / parent_ratio;
  out.keep = out.p <= delta_p;
  return out;
}

VdrcCheck vdrc_parent(const GaussianSplat& g, const std::vector<CameraView>& views,
                      double delta_p) {
  VdrcCheck out;  // pass-by-default
  if (!g.has_init_ratio()) return out;
  if (g.init_ref_view < 0 || g.init_ref_view >= static_cast<int>(views.size())) return out;
  const auto ratio = depth_ratio(g.mu, views[g.init_ref_view]);
  if (!ratio) return out;  // prior cannot testify
  out.p = std::abs(g.init_depth_ratio - *ratio) / g.init_depth_ratio;
  out.keep = out.p <= delta_p;
  return out;
}

std::optional<Vec3> world_normal_at(const CameraView& cam, const Vec2& pixel) {
  if (!cam.has_normal_prior()) return std::nullopt;
  const int x = static_cast<int>(std::floor(pixel.x()));
  const int y = static_cast<int>(std::floor(pixel.y()));
  if (!cam.normal_prior.contains(x, y)) return std::nullopt;
  Vec3 n(cam.normal_prior.at(x, y, 0), cam.normal_prior.at(x, y, 1),
         cam.normal_prior.at(x, y, 2));
  const double len = n.norm();
  if (!(len > 0.5) || !n.allFinite()) return std::nullopt;  // zero vector marks invalid
  return cam.rotation.transpose() * (n / len);
}

std::optional<double> gradient_at(const Image& grad_map, const Vec2& pixel) {
  if (grad_map.empty()) return std::nullopt;
  const int x = static_cast<int>(std::floor(pixel.x()));
  const int y = static_cast<int>(std::floor(pixel.y()));
  if (!grad_map.contains(x, y)) return std::nullopt;
  return std::min(1.0, std::max(0.0, grad_map.at(x, y)));
}

Vec3 guided_child_position(const Vec3& mu_parent, const Vec3& mu_sampled,
                           const Vec3& normal_world, double grad01) {
  if (grad01 >= 1.0) return mu_sampled;
  const Vec3 perp = mu_sampled - normal_world.dot(mu_sampled - mu_parent) * normal_world;
  if (grad01 <= 0.0) return perp;
  return grad01 * mu_sampled + (1.0 - grad01) * perp;
}

Vec3 sample_from_pdf(const GaussianSplat& parent, Rng& rng) {
  const Mat3 r = quat_to_matrix(parent.rot);
  return parent.mu + r * (parent.scale().asDiagonal() * rng.normal3());
}

void DecisionLog::append_csv(const std::string& path) const {
  const bool fresh = !std::filesystem::exists(path);
  std::ofstream f(path, std::ios::app);
  if (!f) throw io_error("DecisionLog: cannot write " + path);
  if (fresh) f << "iteration,splat_id,check,s_hat,p,decision\n";
  char buf[160];
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof(buf), "%d,%d,%c,%.17g,%.17g,%s\n", row.iteration,
                  row.splat_id, row.check, row.s_hat, row.p,
                  row.keep ? "keep" : "discard");
    f << buf;
  }
}

std::vector<GaussianSplat> sample_children(const GaussianSplat& parent, int parent_id,
                                           int n, const SplitContext& ctx,
                                           double s_hat, DecisionLog* log) {
  const std::vector<CameraView>& views = *ctx.views;
  const CameraView* ref = nullptr;
  if (parent.ref_view >= 0 && parent.ref_view < static_cast<int>(views.size()))
    ref = &views[parent.ref_view];

  Rng rng = child_rng(ctx.seed, static_cast<uint64_t>(parent_id),
                      static_cast<uint64_t>(ctx.iteration));

  // Parent-side quantities on the reference view (shared by all children).
  std::optional<ViewProjection> parent_proj;
  std::optional<double> parent_ratio;
  std::optional<Vec3> normal_world;
  if (ref) {
    parent_proj = project_to_view(parent.mu, *ref);
    parent_ratio = depth_ratio(parent.mu, *ref);
    if (ctx.use_normal_guide && parent_proj)
      normal_world = world_normal_at(*ref, parent_proj->pixel);
  }

  std::vector<GaussianSplat> children;
  children.reserve(n);
  for (int i = 0; i < n; ++i) {
    const Vec3 sampled = sample_from_pdf(parent, rng);

    GaussianSplat child = parent;
    child.mu = sampled;
    child.log_scale = parent.log_scale.array() - std::log(ctx.split_scale_divisor);
    child.max_weight = 0.0;

    if (ctx.use_normal_guide && ref && normal_world) {
      const auto child_proj = project_to_view(sampled, *ref);
      const auto grad = child_proj ? gradient_at(ref->gradient, child_proj->pixel)
                                   : std::nullopt;
      if (grad)  // otherwise: unguided sample (normal/gradient unavailable)
        child.mu = guided_child_position(parent.mu, sampled, *normal_world, *grad);
    }

    bool keep = true;
    double p_value = 0.0;
    std::optional<double> child_ratio;
    if (ctx.use_vdrc && ref && parent_ratio) {
      child_ratio = depth_ratio(child.mu, *ref);
      if (child_ratio) {
        const VdrcCheck check = vdrc_child(*parent_ratio, *child_ratio, ctx.delta_p);
        keep = check.keep;
        p_value = check.p;
      }  // unavailable child ratio: keep (prior cannot testify)
    }
    if (log)
      log->rows.push_back({ctx.iteration, parent_id, 'c', s_hat, p_value, keep});

    if (!keep) {
      children.push_back(parent);  // the parent takes the discarded child's place
      continue;
    }
    if (ref) {
      child.init_ref_view = parent.ref_view;
      const auto r = child_ratio ? child_ratio : depth_ratio(child.mu, *ref);
      child.init_depth_ratio = r ? *r : kUnsetRatio;
    } else {
      child.init_ref_view = kNoView;
      child.init_depth_ratio = kUnsetRatio;
    }
    children.push_back(std::move(child));
  }
  return children;
}

void update_reference_view(Scene* scene, int view_index,
                           const std::vector<double>& per_splat_max_weight) {
  const size_t n = std::min(scene->splats.size(), per_splat_max_weight.size());
  for (size_t i = 0; i < n; ++i) {
    GaussianSplat& g = scene->splats[i];
    if (per_splat_max_weight[i] > g.max_weight) {
      g.max_weight = per_splat_max_weight[i];
      g.ref_view = view_index;
    }
  }
}

}  // namespace desksplat
