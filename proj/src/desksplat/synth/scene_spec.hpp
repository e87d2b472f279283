#pragma once

#include <string>
#include <vector>

#include "desksplat/core/splat.hpp"
#include "desksplat/synth/metrics.hpp"

namespace desksplat {

// ---------------------------------------------------------------------------
// Declarative description of a synthetic benchmark scene, parsed from JSON.
// See README.md ("Synthetic scene spec") for the schema.
// ---------------------------------------------------------------------------

enum class TextureKind { kFlat, kChecker, kImage };

struct SurfaceTexture {
  TextureKind kind = TextureKind::kFlat;
  Vec3 color_a = Vec3(0.5, 0.5, 0.5);  // flat color / checker color A
  Vec3 color_b = Vec3(0.0, 0.0, 0.0);  // checker color B
  double period = 0.25;                // checker cell edge, world units
  std::string image_path;              // kImage: PNG, resolved against the spec file
};

enum class SurfaceKind { kPlane, kBox };

struct SceneSurface {
  std::string name;
  SurfaceKind kind = SurfaceKind::kPlane;
  // Plane: one bounded rectangle.
  Vec3 origin = Vec3::Zero();
  Vec3 edge0 = Vec3::Zero();
  Vec3 edge1 = Vec3::Zero();
  // Box: axis-aligned, optionally rotated about its center.
  Vec3 center = Vec3::Zero();
  Vec3 size = Vec3::Zero();             // full extents per axis
  Vec4 box_rot = Vec4(1, 0, 0, 0);      // quaternion (w, x, y, z)
  SurfaceTexture texture;
  bool textured = true;                 // region label for density evaluation
};

struct CameraTrajectory {
  enum class Type { kOrbit, kGrid } type = Type::kOrbit;
  int count = 8;                 // orbit: number of views on the arc
  Vec3 target = Vec3::Zero();    // look-at point for every view
  double radius = 2.0;           // orbit: horizontal distance from target
  double height = 0.0;           // orbit: camera y-offset above target
  double arc_deg = 360.0;        // orbit: swept arc, centered on -z of target
  int rows = 2, cols = 4;        // grid: camera array layout
  double span = 1.0;             // grid: world extent of the array (both axes)
  double distance = 2.0;         // grid: offset from target along -z
  double fov_deg = 60.0;         // horizontal field of view
};

struct SyntheticSceneSpec {
  unsigned long long seed = 0;
  int image_width = 160;
  int image_height = 120;
  double depth_scale = 1.0;   // global multiplier on emitted depth priors
  double depth_noise = 0.0;   // relative Gaussian sigma on emitted depth
  int sfm_points = 1000;      // target number of synthetic SfM samples
  int supersample = 2;        // NxN sub-rays per pixel for the color render
  CameraTrajectory cameras;
  std::vector<SceneSurface> surfaces;
};

// Parses and validates a spec. Throws config_error on schema violations,
// fewer than 2 cameras, degenerate surfaces, or depth_scale <= 0.
SyntheticSceneSpec parse_scene_spec_json(const std::string& json_text,
                                         const std::string& base_dir = "");
SyntheticSceneSpec load_scene_spec(const std::string& path);

// One renderable/evaluable rectangle with its region label. Boxes expand to 6
// faces that share the box's texture and label.
struct GtSurface {
  std::string name;
  bool textured = true;
  SurfaceFace face;
  int surface_index = -1;  // which SceneSurface produced this face
};

std::vector<GtSurface> build_faces(const SyntheticSceneSpec& spec);

// Look-at pinhole cameras (z forward, y down in image space) distributed per
// the trajectory block. Image ids are 1-based; names are view_%03d.png.
std::vector<CameraView> build_cameras(const SyntheticSceneSpec& spec);

// Ground-truth surface list serialization (gt_surfaces.json in a generated
// dataset) so evaluation never re-parses the original spec.
void write_gt_surfaces(const std::string& path, const std::vector<GtSurface>& faces);
std::vector<GtSurface> load_gt_surfaces(const std::string& path);

inline std::vector<SurfaceFace> bare_faces(const std::vector<GtSurface>& faces) {
  std::vector<SurfaceFace> out;
  out.reserve(faces.size());
  for (const auto& f : faces) out.push_back(f.face);
  return out;
}

// Index of the face whose bounded rectangle is nearest to p (ties keep the
// earlier face). Returns -1 for an empty list.
int nearest_surface(const Vec3& p, const std::vector<GtSurface>& faces);

struct DensityBreakdown {
  size_t n_textured = 0, n_textureless = 0;
  double area_textured = 0.0, area_textureless = 0.0;
  double ratio = 1.0;
};

// Assigns each point to its nearest face and contrasts splats-per-area between
// the textured and textureless labels.
DensityBreakdown density_breakdown(const std::vector<Vec3>& points,
                                   const std::vector<GtSurface>& faces);

}  // namespace desksplat
