#pragma once

#include <string>
#include <vector>

#include "desksplat/io/colmap.hpp"
#include "desksplat/synth/scene_spec.hpp"

namespace desksplat {

// In-memory result of synthesizing one benchmark dataset.
struct GeneratedDataset {
  std::vector<CameraView> views;  // GT image / depth prior / normal prior attached
  std::vector<SfmPoint> points;   // synthetic sparse reconstruction
  std::vector<GtSurface> faces;   // ground-truth geometry with region labels
  std::vector<Image> masks;       // per view, 1 channel (values below)
};

// Region-mask pixel values (stored as 8-bit PNG levels 255 / 128 / 0).
constexpr double kMaskTextured = 1.0;
constexpr double kMaskTextureless = 128.0 / 255.0;
constexpr double kMaskBackground = 0.0;

// Ray-traces ground-truth renders, scaled depth priors, analytic camera-frame
// normals, and region masks for every camera, and samples a synthetic sparse
// reconstruction whose surface density follows the local texture gradient.
// Deterministic for a fixed spec (including seed). Throws config_error when a
// camera sits inside a box surface.
GeneratedDataset generate(const SyntheticSceneSpec& spec);

// generate() plus writing the dataset under out_dir in the layout the loader
// expects: images/, depths/, normals/, masks/, sparse/ and gt_surfaces.json.
GeneratedDataset generate_dataset(const SyntheticSceneSpec& spec,
                                  const std::string& out_dir);

}  // namespace desksplat
