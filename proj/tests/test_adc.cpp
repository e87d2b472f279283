#include <doctest.h>

#include "desksplat/densify/adc.hpp"
#include "support/test_utils.hpp"

using namespace desksplat;
using testutil::make_camera;

namespace {

// One camera with a constant-depth prior plane at z = 2 plus its normals.
std::vector<CameraView> plane_views() {
  CameraView cam = make_camera(0, 64, 48, 70);
  cam.depth_prior = Image(64, 48, 1, 2.0);
  cam.normal_prior = Image(64, 48, 3);
  for (int y = 0; y < 48; ++y)
    for (int x = 0; x < 64; ++x) cam.normal_prior.at(x, y, 2) = -1.0;
  cam.gradient = Image(64, 48, 1, 0.0);
  return {cam};
}

GaussianSplat on_plane_splat(double sigma) {
  GaussianSplat g;
  g.mu = Vec3(0, 0, 2);
  g.log_scale = Vec3::Constant(std::log(sigma));
  g.opacity = logit(0.7);
  g.ref_view = 0;
  g.init_ref_view = 0;
  g.init_depth_ratio = 1.0;
  return g;
}

DensifyStats stats_for(const Scene& scene) {
  DensifyStats s;
  s.resize(scene.splats.size());
  for (auto& d : s.denom) d = 1;
  return s;
}

}  // namespace

TEST_SUITE_BEGIN("adc");

TEST_CASE("quiet round only prunes") {
  auto views = plane_views();
  Scene scene;
  scene.iteration = 600;
  scene.splats.push_back(on_plane_splat(0.05));
  scene.splats.push_back(on_plane_splat(0.05));
  scene.splats[1].opacity = logit(0.001);  // below the prune floor
  DensifyStats stats = stats_for(scene);
  const AdcResult res =
      adc_step(&scene, stats, {}, views, AdcConfig{}, 4.0, 1e-4, 7, nullptr);
  CHECK(scene.splats.size() == 1);
  CHECK(res.n_pruned == 1);
  CHECK(res.n_split == 0);
  CHECK(res.n_cloned == 0);
  CHECK(res.old_index == std::vector<int>{0});
}

TEST_CASE("large splat above the gradient threshold splits into two") {
  auto views = plane_views();
  Scene scene;
  scene.iteration = 600;
  scene.splats.push_back(on_plane_splat(0.2));  // 5% of extent 4.0: large
  DensifyStats stats = stats_for(scene);
  stats.grad_accum[0] = 1.0;  // mean 1.0 >> 2e-4
  AdcConfig cfg;
  cfg.use_vdrc = false;  // keep every child for the bookkeeping check
  DecisionLog log;
  const AdcResult res = adc_step(&scene, stats, {}, views, cfg, 4.0, 1e-4, 7, &log);
  CHECK(res.n_split == 1);
  REQUIRE(scene.splats.size() == 2);  // net +1
  CHECK(res.old_index == std::vector<int>{-1, -1});
  for (const auto& g : scene.splats) {
    CHECK(g.scale()[0] == doctest::Approx(0.2 / 1.6).epsilon(1e-12));
    CHECK(g.init_ref_view == 0);  // inherited the parent's reference view
    CHECK(g.max_weight == 0.0);
  }
  CHECK(log.rows.size() == 2);
  for (const auto& row : log.rows) CHECK(row.check == 'c');
}

TEST_CASE("small splat above the gradient threshold clones with a shift") {
  auto views = plane_views();
  Scene scene;
  scene.iteration = 600;
  scene.splats.push_back(on_plane_splat(0.02));  // 0.5% of extent: small
  DensifyStats stats = stats_for(scene);
  stats.grad_accum[0] = 1.0;
  stats.grad3d_accum[0] = Vec3(0.5, -1.0, 0.0);
  stats.denom[0] = 2;
  stats.grad_accum[0] = 2.0 * 3e-4;  // mean 3e-4, just above threshold
  const GaussianSplat original = scene.splats[0];
  const AdcResult res =
      adc_step(&scene, stats, {}, views, AdcConfig{}, 4.0, 0.01, 7, nullptr);
  CHECK(res.n_cloned == 1);
  REQUIRE(scene.splats.size() == 2);
  CHECK(res.old_index == std::vector<int>{0, -1});
  CHECK(scene.splats[0].mu == original.mu);  // source untouched
  const Vec3 expect_shift = -0.01 * (Vec3(0.5, -1.0, 0.0) / 2.0);
  CHECK((scene.splats[1].mu - (original.mu + expect_shift)).norm() < 1e-15);
  CHECK(scene.splats[1].max_weight == 0.0);
  CHECK(scene.splats[1].init_ref_view == 0);
  CHECK(scene.splats[1].init_depth_ratio > 0.0);  // recorded at the shifted spot
}

TEST_CASE("gradient just below the threshold does nothing") {
  auto views = plane_views();
  Scene scene;
  scene.iteration = 600;
  scene.splats.push_back(on_plane_splat(0.02));
  DensifyStats stats = stats_for(scene);
  stats.grad_accum[0] = 1.9e-4;
  const AdcResult res =
      adc_step(&scene, stats, {}, views, AdcConfig{}, 4.0, 0.01, 7, nullptr);
  CHECK(scene.splats.size() == 1);
  CHECK(res.n_cloned + res.n_split == 0);
}

TEST_CASE("blur-selected splat splits regardless of gradient") {
  auto views = plane_views();
  Scene scene;
  scene.iteration = 600;
  scene.splats.push_back(on_plane_splat(0.02));  // small and gradient-quiet
  DensifyStats stats = stats_for(scene);
  stats.max_weighted_area[0] = 51.5;
  AdcConfig cfg;
  cfg.use_vdrc = false;
  DecisionLog log;
  const AdcResult res = adc_step(&scene, stats, {0}, views, cfg, 4.0, 1e-4, 7, &log);
  CHECK(res.n_split == 1);
  CHECK(scene.splats.size() == 2);
  CHECK(log.rows.size() == 2);
  CHECK(log.rows[0].s_hat == 51.5);  // the area that triggered the split
}

TEST_CASE("parent depth check excludes drifted parents from splitting") {
  auto views = plane_views();
  Scene scene;
  scene.iteration = 600;
  scene.splats.push_back(on_plane_splat(0.2));
  scene.splats.push_back(on_plane_splat(0.2));
  scene.splats[1].mu = Vec3(0.2, 0, 1.0);  // prior says 2.0: ratio drifted to 2
  DensifyStats stats = stats_for(scene);
  stats.grad_accum[0] = stats.grad_accum[1] = 1.0;
  const GaussianSplat drifted = scene.splats[1];
  DecisionLog log;
  const AdcResult res =
      adc_step(&scene, stats, {}, views, AdcConfig{}, 4.0, 1e-4, 7, &log);
  CHECK(res.n_excluded == 1);
  CHECK(res.n_split == 1);
  REQUIRE(scene.splats.size() == 3);  // two children + the held-back parent
  // the drifted parent is present and bitwise unchanged
  bool found = false;
  for (size_t i = 0; i < scene.splats.size(); ++i)
    if (res.old_index[i] == 1) {
      found = true;
      CHECK(scene.splats[i].mu == drifted.mu);
      CHECK(scene.splats[i].log_scale == drifted.log_scale);
      CHECK(scene.splats[i].opacity == drifted.opacity);
    }
  CHECK(found);
  // log carries one parent row per candidate, in id order
  REQUIRE(log.rows.size() >= 2);
  CHECK(log.rows[0].check == 'p');
  CHECK(log.rows[0].splat_id == 0);
  CHECK(log.rows[0].keep);
  CHECK(log.rows[1].check == 'p');
  CHECK(log.rows[1].splat_id == 1);
  CHECK_FALSE(log.rows[1].keep);
  CHECK(log.rows[1].p == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("depth check replaces off-surface children with parent copies") {
  auto views = plane_views();
  Scene scene;
  scene.iteration = 600;
  GaussianSplat parent = on_plane_splat(0.2);
  parent.log_scale = Vec3(std::log(0.05), std::log(0.05), std::log(0.9));
  scene.splats.push_back(parent);
  DensifyStats stats = stats_for(scene);
  stats.grad_accum[0] = 1.0;
  AdcConfig cfg;
  cfg.use_normal_guide = false;  // children scatter along z and fail the check
  cfg.children_per_split = 16;
  const AdcResult res =
      adc_step(&scene, stats, {}, views, cfg, 4.0, 1e-4, 7, nullptr);
  REQUIRE(scene.splats.size() == 16);
  int replaced = 0;
  for (size_t i = 0; i < scene.splats.size(); ++i)
    if (res.old_index[i] == 0) {
      ++replaced;
      CHECK(scene.splats[i].mu == parent.mu);
      CHECK(scene.splats[i].log_scale == parent.log_scale);
    } else {
      CHECK(res.old_index[i] == -1);
      CHECK(std::abs(scene.splats[i].mu.z() - 2.0) / 2.0 <= 0.1 + 1e-12);
    }
  CHECK(replaced > 8);  // sigma_z 0.9 at depth 2: most children land off-surface
}

TEST_CASE("children below the prune floor vanish immediately") {
  auto views = plane_views();
  Scene scene;
  scene.iteration = 600;
  scene.splats.push_back(on_plane_splat(0.2));
  scene.splats[0].opacity = logit(0.004);  // children inherit this
  DensifyStats stats = stats_for(scene);
  AdcConfig cfg;
  cfg.use_vdrc = false;
  const AdcResult res = adc_step(&scene, stats, {0}, views, cfg, 4.0, 1e-4, 7, nullptr);
  CHECK(res.n_split == 1);
  CHECK(res.n_pruned == 2);
  CHECK(scene.splats.empty());
}

TEST_CASE("periodic opacity clamp") {
  auto views = plane_views();
  Scene scene;
  scene.iteration = 3000;
  scene.splats.push_back(on_plane_splat(0.02));
  scene.splats.push_back(on_plane_splat(0.02));
  scene.splats[1].opacity = logit(0.008);  // already below the clamp: untouched
  DensifyStats stats = stats_for(scene);
  adc_step(&scene, stats, {}, views, AdcConfig{}, 4.0, 1e-4, 7, nullptr);
  CHECK(scene.splats[0].alpha() == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(scene.splats[1].alpha() == doctest::Approx(0.008).epsilon(1e-12));

  Scene other;
  other.iteration = 2900;  // off the reset beat
  other.splats.push_back(on_plane_splat(0.02));
  DensifyStats stats2 = stats_for(other);
  adc_step(&other, stats2, {}, views, AdcConfig{}, 4.0, 1e-4, 7, nullptr);
  CHECK(other.splats[0].alpha() == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("identical inputs give identical mutations") {
  auto views = plane_views();
  Rng rng(9);
  auto build = [&](uint64_t) {
    Scene scene;
    scene.iteration = 800;
    for (int i = 0; i < 6; ++i) {
      GaussianSplat g = on_plane_splat(0.1 + 0.03 * i);
      g.mu = Vec3(0.05 * i, -0.03 * i, 2.0);
      scene.splats.push_back(g);
    }
    return scene;
  };
  Scene a = build(1), b = build(1);
  DensifyStats stats = stats_for(a);
  for (auto& v : stats.grad_accum) v = 1.0;
  const AdcResult ra = adc_step(&a, stats, {2}, views, AdcConfig{}, 4.0, 1e-4, 99, nullptr);
  const AdcResult rb = adc_step(&b, stats, {2}, views, AdcConfig{}, 4.0, 1e-4, 99, nullptr);
  CHECK(ra.old_index == rb.old_index);
  REQUIRE(a.splats.size() == b.splats.size());
  for (size_t i = 0; i < a.splats.size(); ++i) {
    CHECK(a.splats[i].mu == b.splats[i].mu);
    CHECK(a.splats[i].log_scale == b.splats[i].log_scale);
  }
}

TEST_SUITE_END();
