#pragma once

#include <string>
#include <vector>

#include "desksplat/core/splat.hpp"

namespace desksplat {

// Binary little-endian PLY in the common splat-trainer vertex layout:
// x,y,z,nx,ny,nz,f_dc_0..2,f_rest_0..44,opacity,scale_0..2,rot_0..3 (float32,
// pre-activation values; f_rest is channel-major). Bookkeeping attributes are
// not part of the PLY (see checkpoint sidecar below).
void export_ply(const std::string& path, const std::vector<GaussianSplat>& splats);

// Accepts any binary little-endian PLY exposing the required properties;
// missing f_rest coefficients load as zero, unknown properties are skipped.
std::vector<GaussianSplat> import_ply(const std::string& path);

// Rounds every model parameter to float32 precision — what the PLY stores.
// Applied before checkpointing so a reloaded model is bit-identical to the
// one that kept training.
void quantize_to_storage(Scene* scene);

// Checkpoint = <prefix>.ply + <prefix>.meta.json (per-splat ref_view,
// max_weight, init_ref_view, init_depth_ratio and the iteration counter).
void save_checkpoint(const std::string& prefix, const Scene& scene);
Scene load_checkpoint(const std::string& prefix);

}  // namespace desksplat
