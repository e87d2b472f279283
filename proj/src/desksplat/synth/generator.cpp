#include "desksplat/synth/generator.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>

#include "desksplat/core/rng.hpp"
#include "desksplat/io/image_io.hpp"

namespace desksplat {

namespace {

constexpr double kLumaR = 0.299, kLumaG = 0.587, kLumaB = 0.114;
constexpr double kMinRayT = 1e-9;
constexpr double kGradientProbe = 0.01;   // world-space half-step for texture gradient
constexpr double kSfmAcceptFloor = 0.02;  // flat-region sampling probability
constexpr double kKeypointSigma = 0.3;    // px, per-observation reprojection error
constexpr double kOutlierFraction = 0.08;
constexpr int kMaxSampleAttemptsPerPoint = 400;

struct TraceScene {
  const SyntheticSceneSpec* spec = nullptr;
  std::vector<GtSurface> faces;
  std::vector<Image> surface_images;  // per SceneSurface, empty unless image-textured
};

struct RayHit {
  double t = std::numeric_limits<double>::infinity();
  int face = -1;
  double s = 0.0, u = 0.0;  // parallelogram coordinates in [0,1]^2
  bool valid() const { return face >= 0; }
};

bool intersect_face(const SurfaceFace& f, const Vec3& ro, const Vec3& rd, RayHit* hit) {
  const Vec3 n = f.edge0.cross(f.edge1);
  const double denom = n.dot(rd);
  if (std::abs(denom) < 1e-14) return false;
  const double t = n.dot(f.origin - ro) / denom;
  if (t <= kMinRayT) return false;
  const Vec3 v = ro + t * rd - f.origin;
  const double g00 = f.edge0.squaredNorm();
  const double g11 = f.edge1.squaredNorm();
  const double g01 = f.edge0.dot(f.edge1);
  const double det = g00 * g11 - g01 * g01;
  if (!(det > 0.0)) return false;
  const double r0 = v.dot(f.edge0), r1 = v.dot(f.edge1);
  const double s = (g11 * r0 - g01 * r1) / det;
  const double u = (g00 * r1 - g01 * r0) / det;
  if (s < 0.0 || s > 1.0 || u < 0.0 || u > 1.0) return false;
  hit->t = t;
  hit->s = s;
  hit->u = u;
  return true;
}

RayHit trace(const TraceScene& scene, const Vec3& ro, const Vec3& rd) {
  RayHit best;
  for (size_t i = 0; i < scene.faces.size(); ++i) {
    RayHit h;
    if (intersect_face(scene.faces[i].face, ro, rd, &h) && h.t < best.t) {
      best = h;
      best.face = static_cast<int>(i);
    }
  }
  return best;
}

Vec3 sample_image(const Image& img, double s, double u) {
  const double x = s * (img.width - 1);
  const double y = u * (img.height - 1);
  const int x0 = std::clamp(static_cast<int>(std::floor(x)), 0, img.width - 1);
  const int y0 = std::clamp(static_cast<int>(std::floor(y)), 0, img.height - 1);
  const int x1 = std::min(x0 + 1, img.width - 1);
  const int y1 = std::min(y0 + 1, img.height - 1);
  const double fx = x - x0, fy = y - y0;
  Vec3 out;
  for (int c = 0; c < 3; ++c) {
    const int ch = img.channels == 1 ? 0 : c;
    const double top = (1 - fx) * img.at(x0, y0, ch) + fx * img.at(x1, y0, ch);
    const double bot = (1 - fx) * img.at(x0, y1, ch) + fx * img.at(x1, y1, ch);
    out[c] = (1 - fy) * top + fy * bot;
  }
  return out;
}

Vec3 face_color(const TraceScene& scene, int face_index, double s, double u) {
  const GtSurface& g = scene.faces[face_index];
  const SceneSurface& surf = scene.spec->surfaces[g.surface_index];
  const SurfaceTexture& tex = surf.texture;
  switch (tex.kind) {
    case TextureKind::kFlat:
      return tex.color_a;
    case TextureKind::kChecker: {
      const double wu = s * g.face.edge0.norm();
      const double wv = u * g.face.edge1.norm();
      const long long cell = static_cast<long long>(std::floor(wu / tex.period)) +
                             static_cast<long long>(std::floor(wv / tex.period));
      return (cell % 2 == 0) ? tex.color_a : tex.color_b;
    }
    case TextureKind::kImage:
      return sample_image(scene.surface_images[g.surface_index], s, u);
  }
  return tex.color_a;
}

double face_luma(const TraceScene& scene, int face_index, double s, double u) {
  const Vec3 c = face_color(scene, face_index, s, u);
  return kLumaR * c.x() + kLumaG * c.y() + kLumaB * c.z();
}

// World-space texture gradient magnitude at (s, u), via central differences a
// fixed world distance apart (clamped to the face), so the sampling density
// contrast does not depend on the face's parameterization.
double texture_gradient(const TraceScene& scene, int face_index, double s, double u) {
  const GtSurface& g = scene.faces[face_index];
  const double hs = kGradientProbe / g.face.edge0.norm();
  const double hu = kGradientProbe / g.face.edge1.norm();
  const double ds = face_luma(scene, face_index, std::min(s + hs, 1.0), u) -
                    face_luma(scene, face_index, std::max(s - hs, 0.0), u);
  const double du = face_luma(scene, face_index, s, std::min(u + hu, 1.0)) -
                    face_luma(scene, face_index, s, std::max(u - hu, 0.0));
  return std::abs(ds) + std::abs(du);
}

void check_cameras_outside_geometry(const SyntheticSceneSpec& spec,
                                    const std::vector<CameraView>& views) {
  for (const auto& surf : spec.surfaces) {
    if (surf.kind != SurfaceKind::kBox) continue;
    const Mat3 r = quat_to_matrix(surf.box_rot);
    for (const auto& v : views) {
      const Vec3 local = r.transpose() * (v.camera_center() - surf.center);
      if ((local.array().abs() < 0.5 * surf.size.array()).all())
        throw config_error("generate: camera " + v.name + " is inside box \"" +
                           surf.name + "\"");
    }
  }
}

// Perspective projection of a world point; returns false when behind the
// camera or outside the image bounds.
bool project(const CameraView& v, const Vec3& p_world, Vec2* pixel, double* depth) {
  const Vec3 pc = v.to_camera(p_world);
  if (pc.z() <= 0.01) return false;
  const double u = v.fu * pc.x() / pc.z() + v.cu;
  const double w = v.fv * pc.y() / pc.z() + v.cv;
  if (u < 0.0 || u >= v.width || w < 0.0 || w >= v.height) return false;
  *pixel = Vec2(u, w);
  *depth = pc.z();
  return true;
}

bool occluded(const TraceScene& scene, const Vec3& eye, const Vec3& target) {
  const RayHit h = trace(scene, eye, target - eye);
  // The target sits on a face, so the ray hits it at parameter 1; anything
  // strictly closer blocks the line of sight.
  return h.valid() && h.t < 1.0 - 1e-6;
}

void render_view(const TraceScene& scene, CameraView* view, double depth_scale,
                 double depth_noise, Rng* noise_rng, Image* mask) {
  const SyntheticSceneSpec& spec = *scene.spec;
  const int n = spec.supersample;
  const Vec3 eye = view->camera_center();
  const Mat3 cam_to_world = view->rotation.transpose();

  view->image = Image(view->width, view->height, 3, 0.0);
  view->depth_prior = Image(view->width, view->height, 1, 0.0);
  view->normal_prior = Image(view->width, view->height, 3, 0.0);
  *mask = Image(view->width, view->height, 1, kMaskBackground);

  for (int y = 0; y < view->height; ++y) {
    for (int x = 0; x < view->width; ++x) {
      Vec3 color = Vec3::Zero();
      for (int sy = 0; sy < n; ++sy) {
        for (int sx = 0; sx < n; ++sx) {
          const double u = x + (sx + 0.5) / n;
          const double w = y + (sy + 0.5) / n;
          const Vec3 rd_cam((u - view->cu) / view->fu, (w - view->cv) / view->fv, 1.0);
          const RayHit h = trace(scene, eye, cam_to_world * rd_cam);
          if (h.valid()) color += face_color(scene, h.face, h.s, h.u);
        }
      }
      for (int c = 0; c < 3; ++c) view->image.at(x, y, c) = color[c] / (n * n);

      // Priors and mask come from the pixel-center ray. With the camera-frame
      // direction's z component fixed to 1, the ray parameter is the camera
      // depth itself.
      const Vec3 rd_cam((x + 0.5 - view->cu) / view->fu,
                        (y + 0.5 - view->cv) / view->fv, 1.0);
      const RayHit h = trace(scene, eye, cam_to_world * rd_cam);
      const double noise = depth_noise > 0.0 ? noise_rng->normal(0.0, depth_noise) : 0.0;
      if (!h.valid()) continue;

      const double factor = std::max(1.0 + noise, 0.01);
      view->depth_prior.at(x, y) = h.t * factor * depth_scale;

      const GtSurface& g = scene.faces[h.face];
      Vec3 n_cam = view->rotation * g.face.edge0.cross(g.face.edge1).normalized();
      if (n_cam.dot(rd_cam) > 0.0) n_cam = -n_cam;  // orient toward the camera
      for (int c = 0; c < 3; ++c) view->normal_prior.at(x, y, c) = n_cam[c];

      mask->at(x, y) = g.textured ? kMaskTextured : kMaskTextureless;
    }
  }
}

std::vector<SfmPoint> sample_sfm_points(const TraceScene& scene,
                                        const std::vector<CameraView>& views,
                                        const SyntheticSceneSpec& spec) {
  std::vector<SfmPoint> points;
  if (spec.sfm_points <= 0 || scene.faces.empty()) return points;

  std::vector<double> cum_area;
  double total = 0.0;
  for (const auto& f : scene.faces) {
    total += f.face.edge0.cross(f.face.edge1).norm();
    cum_area.push_back(total);
  }
  if (!(total > 0.0)) return points;

  Rng sampler(mix64(spec.seed ^ 0x73666d706e747300ULL));
  const long long budget =
      static_cast<long long>(spec.sfm_points) * kMaxSampleAttemptsPerPoint;
  long long attempts = 0;
  int point_index = 0;

  while (static_cast<int>(points.size()) < spec.sfm_points && attempts < budget) {
    ++attempts;
    const double pick = sampler.uniform(0.0, total);
    const int face = static_cast<int>(
        std::lower_bound(cum_area.begin(), cum_area.end(), pick) - cum_area.begin());
    const double s = sampler.uniform();
    const double u = sampler.uniform();
    const double accept =
        std::clamp(texture_gradient(scene, face, s, u), kSfmAcceptFloor, 1.0);
    if (sampler.uniform() >= accept) continue;

    const SurfaceFace& f = scene.faces[face].face;
    SfmPoint p;
    p.position = f.origin + s * f.edge0 + u * f.edge1;
    p.color = face_color(scene, face, s, u);

    // Per-point stream: keypoint noise does not depend on how many attempts
    // the rejection sampler burned before this point.
    Rng noise = child_rng(spec.seed, 0x6f627321ULL, static_cast<uint64_t>(point_index));
    const double outlier_draw = noise.uniform();
    const bool big_error = outlier_draw < kOutlierFraction / 2.0;
    const bool short_track = !big_error && outlier_draw < kOutlierFraction;

    double err_sum = 0.0;
    for (size_t vi = 0; vi < views.size(); ++vi) {
      Vec2 pixel;
      double depth;
      if (!project(views[vi], p.position, &pixel, &depth)) continue;
      if (occluded(scene, views[vi].camera_center(), p.position)) continue;
      double mag = std::abs(noise.normal(0.0, kKeypointSigma));
      if (big_error) mag += noise.uniform(1.5, 4.0);
      const double ang = noise.uniform(0.0, 2.0 * M_PI);
      SfmObservation obs;
      obs.view_index = static_cast<int>(vi);
      obs.keypoint = pixel + mag * Vec2(std::cos(ang), std::sin(ang));
      err_sum += mag;
      p.track.push_back(obs);
    }
    if (short_track && p.track.size() > 2) {
      err_sum = 0.0;
      p.track.resize(2);
      for (const auto& obs : p.track) {
        Vec2 pixel;
        double depth;
        project(views[obs.view_index], p.position, &pixel, &depth);
        err_sum += (obs.keypoint - pixel).norm();
      }
    }
    if (p.track.size() < 2) continue;  // a real reconstruction would drop these
    p.reproj_error = err_sum / p.track.size();
    points.push_back(std::move(p));
    ++point_index;
  }
  return points;
}

}  // namespace

GeneratedDataset generate(const SyntheticSceneSpec& spec) {
  GeneratedDataset out;
  out.faces = build_faces(spec);
  out.views = build_cameras(spec);
  check_cameras_outside_geometry(spec, out.views);

  TraceScene scene;
  scene.spec = &spec;
  scene.faces = out.faces;
  scene.surface_images.resize(spec.surfaces.size());
  for (size_t i = 0; i < spec.surfaces.size(); ++i)
    if (spec.surfaces[i].texture.kind == TextureKind::kImage)
      scene.surface_images[i] = read_png(spec.surfaces[i].texture.image_path);

  out.masks.resize(out.views.size());
  for (size_t vi = 0; vi < out.views.size(); ++vi) {
    Rng noise_rng = child_rng(spec.seed, 0x646e6f697365ULL, vi);
    render_view(scene, &out.views[vi], spec.depth_scale, spec.depth_noise, &noise_rng,
                &out.masks[vi]);
  }
  out.points = sample_sfm_points(scene, out.views, spec);
  return out;
}

GeneratedDataset generate_dataset(const SyntheticSceneSpec& spec,
                                  const std::string& out_dir) {
  namespace fs = std::filesystem;
  GeneratedDataset data = generate(spec);

  std::error_code ec;
  for (const char* sub : {"images", "depths", "normals", "masks", "sparse"}) {
    fs::create_directories(fs::path(out_dir) / sub, ec);
    if (ec)
      throw io_error("generate_dataset: cannot create " +
                     (fs::path(out_dir) / sub).string() + ": " + ec.message());
  }

  for (size_t vi = 0; vi < data.views.size(); ++vi) {
    const CameraView& v = data.views[vi];
    const std::string stem = fs::path(v.name).stem().string();
    write_png((fs::path(out_dir) / "images" / v.name).string(), v.image);
    write_pfm((fs::path(out_dir) / "depths" / (stem + ".pfm")).string(), v.depth_prior);
    write_pfm((fs::path(out_dir) / "normals" / (stem + ".pfm")).string(), v.normal_prior);
    write_png((fs::path(out_dir) / "masks" / (stem + ".png")).string(), data.masks[vi]);
  }
  write_colmap((fs::path(out_dir) / "sparse").string(), data.views, data.points);
  write_gt_surfaces((fs::path(out_dir) / "gt_surfaces.json").string(), data.faces);
  return data;
}

}  // namespace desksplat
