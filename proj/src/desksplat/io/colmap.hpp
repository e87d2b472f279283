#pragma once

#include <string>
#include <utility>
#include <vector>

#include "desksplat/core/splat.hpp"

namespace desksplat {

struct SfmObservation {
  int view_index = -1;  // index into the reconstruction's views
  Vec2 keypoint = Vec2::Zero();
};

struct SfmPoint {
  Vec3 position = Vec3::Zero();
  Vec3 color = Vec3::Zero();        // [0,1]
  double reproj_error = 0.0;        // mean error as recorded in points3D.txt
  std::vector<SfmObservation> track;
};

struct ColmapReconstruction {
  std::vector<CameraView> views;  // sorted by COLMAP image id; id preserved
  std::vector<SfmPoint> points;
};

// Reads cameras.txt / images.txt / points3D.txt from `dir`. Only PINHOLE and
// SIMPLE_PINHOLE camera models are accepted. Images/priors are not loaded
// here (see dataset.hpp).
ColmapReconstruction parse_colmap(const std::string& dir);

// Counterpart writer (text format), used by the synthetic generator and the
// parser round-trip tests. Poses/intrinsics are written with 17 significant
// digits. Track keypoints are emitted as each image's POINTS2D list.
void write_colmap(const std::string& dir, const std::vector<CameraView>& views,
                  const std::vector<SfmPoint>& points);

}  // namespace desksplat
