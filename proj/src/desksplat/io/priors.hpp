#pragma once

#include <string>

#include "desksplat/core/splat.hpp"

namespace desksplat {

// Camera-frame surface normals from a depth map: back-project, cross product
// of central-difference tangents, oriented toward the camera (n . ray < 0).
// Invalid pixels (border, invalid depth, degenerate cross) hold (0,0,0).
Image normals_from_depth(const Image& depth, const CameraView& cam);

// Loads depths/<stem>.pfm and normals/<stem>.pfm for the view if present;
// when only depth exists, normals are derived from it. <stem> is the image
// name without its extension.
void load_priors(CameraView* view, const std::string& dataset_dir);

}  // namespace desksplat
