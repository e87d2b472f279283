#include "desksplat/io/priors.hpp"

#include <cmath>
#include <filesystem>

#include "desksplat/io/image_io.hpp"

namespace desksplat {

namespace {

bool depth_ok(const Image& d, int x, int y) {
  if (!d.contains(x, y)) return false;
  const double v = d.at(x, y);
  return std::isfinite(v) && v > 0.0;
}

Vec3 backproject(const Image& depth, const CameraView& cam, int x, int y) {
  const double d = depth.at(x, y);
  return Vec3((x + 0.5 - cam.cu) / cam.fu * d, (y + 0.5 - cam.cv) / cam.fv * d, d);
}

}  // namespace

Image normals_from_depth(const Image& depth, const CameraView& cam) {
  if (depth.channels != 1) throw config_error("normals_from_depth: expected 1-channel depth");
  Image out(depth.width, depth.height, 3, 0.0);
  for (int y = 0; y < depth.height; ++y) {
    for (int x = 0; x < depth.width; ++x) {
      if (!depth_ok(depth, x, y) || !depth_ok(depth, x - 1, y) || !depth_ok(depth, x + 1, y) ||
          !depth_ok(depth, x, y - 1) || !depth_ok(depth, x, y + 1))
        continue;
      const Vec3 tu = backproject(depth, cam, x + 1, y) - backproject(depth, cam, x - 1, y);
      const Vec3 tv = backproject(depth, cam, x, y + 1) - backproject(depth, cam, x, y - 1);
      Vec3 n = tu.cross(tv);
      const double len = n.norm();
      if (!(len > 1e-300)) continue;  // degenerate
      n /= len;
      if (n.dot(backproject(depth, cam, x, y)) > 0.0) n = -n;
      out.at(x, y, 0) = n.x();
      out.at(x, y, 1) = n.y();
      out.at(x, y, 2) = n.z();
    }
  }
  return out;
}

void load_priors(CameraView* view, const std::string& dataset_dir) {
  namespace fs = std::filesystem;
  const std::string stem = fs::path(view->name).stem().string();
  const fs::path depth_path = fs::path(dataset_dir) / "depths" / (stem + ".pfm");
  const fs::path normal_path = fs::path(dataset_dir) / "normals" / (stem + ".pfm");

  if (fs::exists(depth_path)) {
    view->depth_prior = read_pfm(depth_path.string());
    if (view->depth_prior.width != view->width || view->depth_prior.height != view->height)
      throw io_error("load_priors: depth size mismatch for " + view->name);
    if (view->depth_prior.channels != 1)
      throw io_error("load_priors: depth map must be single channel: " + depth_path.string());
  }
  if (fs::exists(normal_path)) {
    view->normal_prior = read_pfm(normal_path.string());
    if (view->normal_prior.channels != 3 || view->normal_prior.width != view->width ||
        view->normal_prior.height != view->height)
      throw io_error("load_priors: bad normal map for " + view->name);
  } else if (view->has_depth_prior()) {
    view->normal_prior = normals_from_depth(view->depth_prior, *view);
  }
}

}  // namespace desksplat
