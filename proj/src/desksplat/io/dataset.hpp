#pragma once

#include <string>
#include <vector>

#include "desksplat/io/colmap.hpp"

namespace desksplat {

struct Dataset {
  std::string dir;
  std::vector<CameraView> views;
  std::vector<SfmPoint> points;

  bool any_depth_prior() const {
    for (const auto& v : views)
      if (v.has_depth_prior()) return true;
    return false;
  }
};

// Reads <dir>/sparse (or <dir>) COLMAP text files, then images/<name> and
// the per-view priors.
Dataset load_dataset(const std::string& dir);

struct FilteredPoint {
  int point_index = -1;
  int init_ref_view = kNoView;
  double init_depth_ratio = kUnsetRatio;
};

// Track-length and reprojection-error filter; picks the initial reference
// view by smallest per-observation reprojection error and records the depth
// ratio there (unset when the view lacks a usable prior).
std::vector<FilteredPoint> filter_sfm_points(const std::vector<SfmPoint>& points,
                                             const std::vector<CameraView>& views,
                                             int min_track = 3, double max_reproj = 1.0);

// Filtered points -> initial splats with 3-NN scales and bookkeeping.
Scene build_initial_scene(const Dataset& ds, double fallback_scale = 0.01);

// Radius of the camera rig (max distance from the mean camera center),
// inflated by 1.1 — the densification/learning-rate length scale.
double scene_extent(const std::vector<CameraView>& views);

}  // namespace desksplat
