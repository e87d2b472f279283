#include "desksplat/io/dataset.hpp"

#include <cmath>
#include <filesystem>
#include <limits>

#include "desksplat/densify/geometry.hpp"
#include "desksplat/io/image_io.hpp"
#include "desksplat/io/priors.hpp"

namespace desksplat {

Dataset load_dataset(const std::string& dir) {
  namespace fs = std::filesystem;
  Dataset ds;
  ds.dir = dir;
  const fs::path sparse = fs::path(dir) / "sparse";
  const std::string colmap_dir =
      fs::exists(sparse / "cameras.txt") ? sparse.string() : dir;
  ColmapReconstruction rec = parse_colmap(colmap_dir);
  ds.views = std::move(rec.views);
  ds.points = std::move(rec.points);

  for (auto& v : ds.views) {
    const fs::path img_path = fs::path(dir) / "images" / v.name;
    if (!fs::exists(img_path))
      throw io_error("load_dataset: missing image " + img_path.string());
    v.image = read_png(img_path.string());
    if (v.image.channels == 1) {  // promote grayscale to RGB
      Image rgb(v.image.width, v.image.height, 3);
      for (int y = 0; y < v.image.height; ++y)
        for (int x = 0; x < v.image.width; ++x)
          for (int c = 0; c < 3; ++c) rgb.at(x, y, c) = v.image.at(x, y);
      v.image = std::move(rgb);
    }
    if (v.image.width != v.width || v.image.height != v.height)
      throw io_error("load_dataset: image size mismatch for " + v.name);
    load_priors(&v, dir);
  }
  return ds;
}

std::vector<FilteredPoint> filter_sfm_points(const std::vector<SfmPoint>& points,
                                             const std::vector<CameraView>& views,
                                             int min_track, double max_reproj) {
  std::vector<FilteredPoint> out;
  for (size_t pi = 0; pi < points.size(); ++pi) {
    const SfmPoint& p = points[pi];
    if (static_cast<int>(p.track.size()) < min_track) continue;
    if (p.reproj_error > max_reproj) continue;

    // Reference view: smallest per-observation reprojection error.
    int best_view = kNoView;
    double best_err = std::numeric_limits<double>::infinity();
    for (const auto& obs : p.track) {
      if (obs.view_index < 0 || obs.view_index >= static_cast<int>(views.size())) continue;
      const auto proj = project_to_view(p.position, views[obs.view_index]);
      const double err = proj ? (proj->pixel - obs.keypoint).norm()
                              : std::numeric_limits<double>::infinity();
      if (err < best_err) {
        best_err = err;
        best_view = obs.view_index;
      }
    }
    if (best_view == kNoView) best_view = p.track.front().view_index;

    FilteredPoint fp;
    fp.point_index = static_cast<int>(pi);
    fp.init_ref_view = best_view;
    const auto ratio = depth_ratio(p.position, views[best_view]);
    fp.init_depth_ratio = ratio ? *ratio : kUnsetRatio;
    out.push_back(fp);
  }
  return out;
}

Scene build_initial_scene(const Dataset& ds, double fallback_scale) {
  const auto filtered = filter_sfm_points(ds.points, ds.views);
  std::vector<Vec3> positions;
  positions.reserve(filtered.size());
  for (const auto& fp : filtered) positions.push_back(ds.points[fp.point_index].position);
  const auto nn = mean_knn_distance(positions);

  Scene scene;
  scene.splats.reserve(filtered.size());
  for (size_t i = 0; i < filtered.size(); ++i) {
    const SfmPoint& p = ds.points[filtered[i].point_index];
    GaussianSplat g = splat_from_sfm_point(p.position, p.color, nn[i], fallback_scale);
    g.init_ref_view = filtered[i].init_ref_view;
    g.init_depth_ratio = filtered[i].init_depth_ratio;
    g.ref_view = filtered[i].init_ref_view;
    g.max_weight = 0.0;
    scene.splats.push_back(std::move(g));
  }
  return scene;
}

double scene_extent(const std::vector<CameraView>& views) {
  if (views.empty()) return 1.0;
  Vec3 mean = Vec3::Zero();
  for (const auto& v : views) mean += v.camera_center();
  mean /= static_cast<double>(views.size());
  double radius = 0.0;
  for (const auto& v : views)
    radius = std::max(radius, (v.camera_center() - mean).norm());
  return radius > 0.0 ? 1.1 * radius : 1.0;
}

}  // namespace desksplat
