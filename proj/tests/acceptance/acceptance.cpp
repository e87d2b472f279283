// Acceptance suite: one [PASS]/[FAIL] line per criterion.
//
// Usage: acceptance --fixtures <dir> [--criterion N]
//
// Criteria 5 and 6 are controlled A/B training runs on the shipped fixture
// scenes; the others are property checks against reference implementations
// or frozen constants. Runtime budgets are part of the criteria and are
// enforced: a criterion that exceeds its budget fails even if every check
// inside it passed.
#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "desksplat/cli/commands.hpp"
#include "desksplat/densify/adc.hpp"
#include "desksplat/densify/geometry.hpp"
#include "desksplat/densify/texture.hpp"
#include "desksplat/io/dataset.hpp"
#include "desksplat/io/ply.hpp"
#include "desksplat/render/rasterizer.hpp"
#include "desksplat/synth/generator.hpp"
#include "desksplat/synth/metrics.hpp"
#include "desksplat/synth/scene_spec.hpp"
#include "desksplat/train/trainer.hpp"
#include "../support/test_utils.hpp"

namespace fs = std::filesystem;
using namespace desksplat;
using testutil::make_camera;
using testutil::random_unit_quaternion;
using testutil::random_unit_vector;

namespace {

fs::path g_fixtures;
std::unique_ptr<testutil::TempDir> g_tmp;
std::map<std::string, fs::path> g_datasets;

// The A/B runs raise the clone threshold above the library default: the
// fixtures are small desk scenes where the default would over-densify far
// beyond what a CPU budget supports, without changing any compared behavior.
constexpr double kAbGradThreshold = 6e-4;

struct Result {
  bool ok = true;
  std::string detail;
};

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof(buf), f, args);
  va_end(args);
  return buf;
}

// Generates (once) a dataset from a shipped fixture spec, optionally with a
// rescaled depth channel.
const fs::path& fixture_dataset(const std::string& spec_name, double depth_scale,
                                const std::string& tag) {
  auto it = g_datasets.find(tag);
  if (it != g_datasets.end()) return it->second;
  SyntheticSceneSpec spec = load_scene_spec((g_fixtures / spec_name).string());
  spec.depth_scale = depth_scale;
  const fs::path out = g_tmp->path / tag;
  generate_dataset(spec, out.string());
  return g_datasets.emplace(tag, out).first->second;
}

std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Random splat cloud in front of the camera, covering all SH bands.
Scene random_scene(Rng& rng, int n) {
  Scene scene;
  for (int i = 0; i < n; ++i) {
    GaussianSplat g;
    const double z = rng.uniform(1.5, 6.0);
    g.mu = Vec3(rng.uniform(-0.4, 0.4) * z, rng.uniform(-0.3, 0.3) * z, z);
    g.rot = random_unit_quaternion(rng);
    g.log_scale =
        Vec3(rng.uniform(-3.5, -1.2), rng.uniform(-3.5, -1.2), rng.uniform(-3.5, -1.2));
    g.opacity = rng.uniform(-2.0, 2.5);
    for (int j = 0; j < kShCoeffCount; ++j)
      for (int c = 0; c < 3; ++c) g.sh(j, c) = rng.uniform(-1, 1) * (j == 0 ? 0.4 : 0.08);
    scene.splats.push_back(g);
  }
  return scene;
}

CameraView jittered_camera(Rng& rng, int id, int w, int h, double focal) {
  CameraView cam = make_camera(id, w, h, focal);
  cam.rotation = quat_to_matrix(Vec4(1.0, rng.uniform(-0.05, 0.05),
                                     rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05)));
  cam.translation =
      Vec3(rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1));
  return cam;
}

// ---------------------------------------------------------------------------
// 1. Tiled rasterizer vs. the reference compositor.
// ---------------------------------------------------------------------------
Result criterion_1() {
  Rng rng(101);
  double max_diff = 0.0;
  size_t index_mismatches = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const Scene scene = random_scene(rng, rng.uniform_int(1, 100));
    const CameraView cam = jittered_camera(rng, trial, 32, 32, 26.0);
    const RenderOutput a = render(scene, cam);
    const RenderOutput b = render_brute_force(scene, cam);
    for (size_t i = 0; i < a.color.data.size(); ++i)
      max_diff = std::max(max_diff, std::abs(a.color.data[i] - b.color.data[i]));
    for (size_t i = 0; i < a.index_max.size(); ++i)
      if (a.index_max[i] != b.index_max[i]) ++index_mismatches;
  }
  Result r;
  r.ok = max_diff <= 1e-6 && index_mismatches == 0;
  r.detail = fmt("50 scenes at 32x32, max channel diff %.2e, %zu max-contributor mismatches",
                 max_diff, index_mismatches);
  return r;
}

// ---------------------------------------------------------------------------
// 2. Analytic gradients vs. central finite differences.
// ---------------------------------------------------------------------------
struct FdProbe {
  Scene scene;
  CameraView cam;
  Image coeff;
  RenderOptions opt;

  explicit FdProbe(uint64_t seed) {
    Rng rng(seed);
    cam = make_camera(0, 12, 12, 30);
    cam.rotation = quat_to_matrix(Vec4(1.0, rng.uniform(-0.04, 0.04),
                                       rng.uniform(-0.04, 0.04), rng.uniform(-0.04, 0.04)));
    cam.translation = Vec3(rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05),
                           rng.uniform(-0.05, 0.05));
    for (int i = 0; i < 5; ++i) {
      GaussianSplat g;
      const double z = rng.uniform(1.5, 3.5);
      g.mu = Vec3(rng.uniform(-0.15, 0.15) * z, rng.uniform(-0.15, 0.15) * z, z);
      g.rot = random_unit_quaternion(rng);
      // Footprints larger than the image keep the compositor free of
      // integer-boundary discontinuities under the probe perturbations.
      g.log_scale = Vec3(rng.uniform(std::log(0.6), std::log(1.5)),
                         rng.uniform(std::log(0.6), std::log(1.5)),
                         rng.uniform(std::log(0.6), std::log(1.5)));
      g.opacity = logit(rng.uniform(0.15, 0.45));
      for (int j = 0; j < kShCoeffCount; ++j)
        for (int c = 0; c < 3; ++c) g.sh(j, c) = rng.uniform(-1, 1) * (j == 0 ? 0.25 : 0.02);
      scene.splats.push_back(g);
    }
    coeff = Image(cam.width, cam.height, 3);
    for (auto& v : coeff.data) v = rng.uniform(-1, 1);
  }

  double loss() const {
    const RenderOutput out = render(scene, cam, opt);
    double l = 0.0;
    for (size_t i = 0; i < out.color.data.size(); ++i) l += coeff.data[i] * out.color.data[i];
    return l;
  }

  double fd(double* param) {
    double h = std::max(1e-6, 1e-5 * std::abs(*param));
    const double saved = *param;
    volatile double hi = saved + h, lo = saved - h;
    h = (hi - lo) / 2.0;
    *param = hi;
    const double up = loss();
    *param = lo;
    const double down = loss();
    *param = saved;
    return (up - down) / (2.0 * h);
  }
};

Result criterion_2() {
  // err <= rel * scale + 1e-8: the absolute floor sits above FD roundoff on
  // this loss scale and far below any gradient of consequence.
  double worst_rel = 0.0;
  size_t checked = 0, failed = 0;
  const auto tally = [&](double analytic, double fd_val, double rel_tol) {
    const double scale = std::max(std::abs(analytic), std::abs(fd_val));
    const double err = std::abs(analytic - fd_val);
    if (scale > 1e-6) worst_rel = std::max(worst_rel, err / scale);
    ++checked;
    if (err > rel_tol * scale + 1e-8) ++failed;
  };
  for (uint64_t seed = 0; seed < 30; ++seed) {
    FdProbe probe(7000 + seed);
    const BackwardOutput out = render_backward(probe.scene, probe.cam, probe.coeff, probe.opt);
    for (size_t i = 0; i < probe.scene.splats.size(); ++i) {
      GaussianSplat& g = probe.scene.splats[i];
      for (int k = 0; k < 3; ++k) tally(out.grads[i].mu[k], probe.fd(&g.mu[k]), 1e-3);
      for (int k = 0; k < 3; ++k)
        tally(out.grads[i].log_scale[k], probe.fd(&g.log_scale[k]), 1e-3);
      for (int k = 0; k < 4; ++k) tally(out.grads[i].rot[k], probe.fd(&g.rot[k]), 1e-2);
      tally(out.grads[i].opacity, probe.fd(&g.opacity), 1e-3);
      for (int j = 0; j < kShCoeffCount; ++j)
        for (int c = 0; c < 3; ++c) tally(out.grads[i].sh(j, c), probe.fd(&g.sh(j, c)), 1e-3);
    }
  }
  Result r;
  r.ok = failed == 0;
  r.detail = fmt("30 configs, %zu parameters, worst rel err %.2e, %zu out of tolerance",
                 checked, worst_rel, failed);
  return r;
}

// ---------------------------------------------------------------------------
// 3. Texture weighting identities and threshold schedule endpoints.
// ---------------------------------------------------------------------------
Result criterion_3() {
  Result r;
  const double w_beta = texture_weight(0.16);
  if (w_beta != 0.5) {
    r.ok = false;
    r.detail = fmt("texture_weight(0.16) = %.17g, want exactly 0.5", w_beta);
    return r;
  }
  const double t_start = adaptive_threshold(500, 500, 15000);
  const double t_end = adaptive_threshold(15000, 500, 15000);
  if (t_start != 40.0 || t_end != 4.0) {
    r.ok = false;
    r.detail = fmt("threshold endpoints %.17g / %.17g, want 40 / 4", t_start, t_end);
    return r;
  }
  // With a uniform all-ones weight map, weighted contribution areas must
  // collapse to the plain pixel counts exactly.
  Rng rng(303);
  size_t mismatches = 0, splats = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const Scene scene = random_scene(rng, 40);
    const CameraView cam = jittered_camera(rng, trial, 48, 36, 30.0);
    Image ones(cam.width, cam.height, 1, 1.0);
    RenderOptions opt;
    opt.texture_weight = &ones;
    const RenderOutput out = render(scene, cam, opt);
    for (size_t i = 0; i < out.weighted_contribution.size(); ++i, ++splats)
      if (out.weighted_contribution[i] != static_cast<double>(out.contribution_count[i]))
        ++mismatches;
  }
  r.ok = mismatches == 0;
  r.detail = fmt("weight at the midpoint 0.5, endpoints 40/4, "
                 "uniform-weight areas equal counts for %zu/%zu splats",
                 splats - mismatches, splats);
  return r;
}

// ---------------------------------------------------------------------------
// 4. Depth-ratio validation: decision boundary and scale invariance.
// ---------------------------------------------------------------------------
TrainConfig short_run_config() {
  TrainConfig cfg;
  cfg.iterations = 600;
  cfg.seed = 7;
  cfg.eval_interval = 600;
  cfg.adc.grad_threshold = kAbGradThreshold;
  cfg.adc.densify_from = 200;
  cfg.adc.densify_interval = 100;
  cfg.adc.densify_until = 600;
  return cfg;
}

Result criterion_4() {
  Result r;
  const AdcConfig defaults;
  if (defaults.delta_p != 0.1) {
    r.ok = false;
    r.detail = fmt("default tolerance %.17g, want 0.1", defaults.delta_p);
    return r;
  }
  // Exactly representable ratios on both sides of the boundary.
  if (!vdrc_child(2.0, 1.8, defaults.delta_p).keep ||   // p = 0.0999..
      !vdrc_child(1.0, 1.09375, defaults.delta_p).keep  // p = 0.09375
      || vdrc_child(2.0, 2.25, defaults.delta_p).keep   // p = 0.125
      || vdrc_child(1.0, 1.125, defaults.delta_p).keep) {
    r.ok = false;
    r.detail = "keep/discard decisions wrong at hand-picked boundary ratios";
    return r;
  }
  Rng rng(404);
  for (int i = 0; i < 1000; ++i) {
    const double rp = rng.uniform(0.2, 3.0);
    const double rc = rp * rng.uniform(0.5, 1.5);
    const VdrcCheck c = vdrc_child(rp, rc, defaults.delta_p);
    const double ref = std::abs(rc / rp - 1.0);  // same quantity, other op order
    if (c.keep != (c.p <= defaults.delta_p) ||
        std::abs(c.p - ref) > 1e-12 * std::max(1.0, ref)) {
      r.ok = false;
      r.detail = fmt("inconsistent check at parent %.6g child %.6g", rp, rc);
      return r;
    }
  }

  // End-to-end scale invariance: rescaling the depth priors must not change
  // a single split decision because the validation uses depth ratios only.
  std::vector<DecisionLog> logs;
  for (const double c : {0.5, 1.0, 3.0}) {
    const std::string tag = fmt("door_wall_c%g", c);
    const fs::path& dir = fixture_dataset("door_wall.json", c, tag);
    Dataset ds = load_dataset(dir.string());
    Scene scene = build_initial_scene(ds);
    DecisionLog log;
    train(&scene, &ds.views, short_run_config(), &log);
    logs.push_back(std::move(log));
  }
  size_t child_rows = 0;
  for (const auto& row : logs[1].rows)
    if (row.check == 'c') ++child_rows;
  if (child_rows == 0) {
    r.ok = false;
    r.detail = "no split-child decisions were logged; fixture needs retuning";
    return r;
  }
  for (size_t l = 0; l < logs.size(); ++l) {
    if (logs[l].rows.size() != logs[1].rows.size()) {
      r.ok = false;
      r.detail = fmt("log lengths differ: %zu vs %zu rows", logs[l].rows.size(),
                     logs[1].rows.size());
      return r;
    }
    for (size_t i = 0; i < logs[l].rows.size(); ++i) {
      const DecisionRow &a = logs[l].rows[i], &b = logs[1].rows[i];
      // Decisions must agree exactly; the logged ratio change may move at
      // float32 level because the rescaled priors are stored as float32.
      if (a.iteration != b.iteration || a.splat_id != b.splat_id || a.check != b.check ||
          a.keep != b.keep || std::abs(a.p - b.p) > 1e-5) {
        r.ok = false;
        r.detail = fmt("row %zu differs between depth scales (iter %d/%d, splat %d/%d, "
                       "keep %d/%d, p %.8g/%.8g)",
                       i, a.iteration, b.iteration, a.splat_id, b.splat_id, int(a.keep),
                       int(b.keep), a.p, b.p);
        return r;
      }
    }
  }
  r.detail = fmt("boundary cases hold, %zu logged decisions identical at depth scales "
                 "0.5/1/3",
                 logs[1].rows.size());
  return r;
}

// ---------------------------------------------------------------------------
// 5. Geometry A/B on the door-wall scene.
// ---------------------------------------------------------------------------
TrainConfig ab_config(uint64_t seed) {
  TrainConfig cfg;
  cfg.iterations = 3000;
  cfg.seed = seed;
  cfg.eval_interval = 3000;
  cfg.adc.grad_threshold = kAbGradThreshold;
  cfg.adc.densify_from = 500;
  cfg.adc.densify_interval = 150;
  cfg.adc.densify_until = 2500;
  return cfg;
}

struct AbRun {
  SurfaceFitStats fit;
  double density = 0.0;
  double psnr = 0.0;
  size_t splats = 0;
};

AbRun run_ab(const fs::path& dataset_dir, const TrainConfig& base, bool vdrc, bool guide,
             bool texture_aware, const std::string& out_tag) {
  Dataset ds = load_dataset(dataset_dir.string());
  TrainConfig cfg = base;
  cfg.adc.use_vdrc = vdrc;
  cfg.adc.use_normal_guide = guide;
  cfg.texture_aware = texture_aware;
  if (!out_tag.empty()) cfg.out_dir = (g_tmp->path / out_tag).string();
  Scene scene = build_initial_scene(ds);
  const TrainReport report = train(&scene, &ds.views, cfg);

  AbRun out;
  out.splats = report.final_splats;
  out.psnr = report.heldout_psnr;
  std::vector<Vec3> centers;
  centers.reserve(scene.splats.size());
  for (const auto& g : scene.splats) centers.push_back(g.mu);
  const std::vector<GtSurface> faces =
      load_gt_surfaces((dataset_dir / "gt_surfaces.json").string());
  const double tol = 0.05 * scene_extent(ds.views);
  out.fit = surface_fit_error(centers, bare_faces(faces), tol);
  // The density contrast only exists when both region labels carry area.
  double area_textured = 0.0, area_textureless = 0.0;
  for (const auto& f : faces) {
    const double area = f.face.edge0.cross(f.face.edge1).norm();
    (f.textured ? area_textured : area_textureless) += area;
  }
  if (area_textured > 0.0 && area_textureless > 0.0)
    out.density = density_breakdown(centers, faces).ratio;
  return out;
}

Result criterion_5() {
  const fs::path& dir = fixture_dataset("door_wall.json", 1.0, "door_wall_c1");
  const TrainConfig base = ab_config(19);
  const AbRun full = run_ab(dir, base, true, true, true, "");
  const AbRun control = run_ab(dir, base, false, false, true, "");
  Result r;
  const bool mean_ok = full.fit.mean < control.fit.mean;
  const bool p95_ok = full.fit.p95 < control.fit.p95;
  const bool frac_ok = full.fit.fraction_above <= 0.7 * control.fit.fraction_above;
  r.ok = mean_ok && p95_ok && frac_ok;
  r.detail = fmt("surface distance mean %.4g vs %.4g, p95 %.4g vs %.4g, "
                 "off-surface fraction %.4g vs %.4g (full vs control)",
                 full.fit.mean, control.fit.mean, full.fit.p95, control.fit.p95,
                 full.fit.fraction_above, control.fit.fraction_above);
  return r;
}

// ---------------------------------------------------------------------------
// 6. Texture A/B on the two-region plane.
// ---------------------------------------------------------------------------
Result criterion_6() {
  const fs::path& dir = fixture_dataset("two_region_plane.json", 1.0, "two_region");
  const TrainConfig base = ab_config(23);
  const AbRun full = run_ab(dir, base, true, true, true, "ab_full");
  const AbRun control = run_ab(dir, base, true, true, false, "ab_control");
  Result r;
  const bool density_ok = full.density > control.density;
  const bool psnr_ok = full.psnr >= control.psnr - 0.1;
  const bool count_ok = full.splats <= control.splats;
  r.ok = density_ok && psnr_ok && count_ok;
  r.detail = fmt("density ratio %.4g vs %.4g, held-out psnr %.4g vs %.4g dB, "
                 "%zu vs %zu splats (full vs control)",
                 full.density, control.density, full.psnr, control.psnr, full.splats,
                 control.splats);
  return r;
}

// ---------------------------------------------------------------------------
// 7. Normal-guided child placement geometry.
// ---------------------------------------------------------------------------
Result criterion_7() {
  Rng rng(707);
  double worst_dot = 0.0;
  size_t exact_mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    GaussianSplat parent;
    parent.mu = rng.normal3();
    parent.rot = random_unit_quaternion(rng);
    parent.log_scale = Vec3(rng.uniform(-3.0, -1.0), rng.uniform(-3.0, -1.0),
                            rng.uniform(-3.0, -1.0));
    const Vec3 normal = random_unit_vector(rng);
    const Vec3 sampled = sample_from_pdf(parent, rng);

    const Vec3 flat = guided_child_position(parent.mu, sampled, normal, 0.0);
    worst_dot = std::max(worst_dot, std::abs(normal.dot(flat - parent.mu)));

    const Vec3 kept = guided_child_position(parent.mu, sampled, normal, 1.0);
    for (int k = 0; k < 3; ++k)
      if (kept[k] != sampled[k]) ++exact_mismatches;
  }
  Result r;
  r.ok = worst_dot <= 1e-9 && exact_mismatches == 0;
  r.detail = fmt("1000 children: worst in-plane deviation %.2e, "
                 "%zu non-identical components at full gradient",
                 worst_dot, exact_mismatches);
  return r;
}

// ---------------------------------------------------------------------------
// 8. Bit-exact reproduction from a run manifest.
// ---------------------------------------------------------------------------
Result criterion_8() {
  const fs::path& dir = fixture_dataset("room_corner.json", 1.0, "room_corner");
  const fs::path cfg_file = g_tmp->path / "repro_config.json";
  {
    std::ofstream out(cfg_file);
    out << R"({"iterations": 400, "eval_interval": 100, "seed": 5,
               "adc": {"densify_from": 100, "densify_interval": 100,
                       "densify_until": 300}})";
  }
  TrainCliOptions first;
  first.dataset_dir = dir.string();
  first.out_dir = (g_tmp->path / "repro_a").string();
  first.config_file = cfg_file.string();
  Result r;
  if (cmd_train(first) != kExitOk) {
    r.ok = false;
    r.detail = "first training run failed";
    return r;
  }
  TrainCliOptions second;
  second.from_manifest = (g_tmp->path / "repro_a" / "manifest.json").string();
  second.out_dir = (g_tmp->path / "repro_b").string();
  if (cmd_train(second) != kExitOk) {
    r.ok = false;
    r.detail = "manifest re-run failed";
    return r;
  }
  const std::string a = read_bytes(g_tmp->path / "repro_a" / "metrics.csv");
  const std::string b = read_bytes(g_tmp->path / "repro_b" / "metrics.csv");
  r.ok = !a.empty() && a == b;
  r.detail = fmt("metrics CSVs %s (%zu bytes)", r.ok ? "identical" : "DIFFER", a.size());
  return r;
}

// ---------------------------------------------------------------------------
// 9. PLY round trip and COLMAP interop.
// ---------------------------------------------------------------------------
Result criterion_9() {
  Result r;
  Rng rng(909);
  Scene scene = random_scene(rng, 120);
  quantize_to_storage(&scene);
  const fs::path p1 = g_tmp->path / "roundtrip1.ply";
  const fs::path p2 = g_tmp->path / "roundtrip2.ply";
  export_ply(p1.string(), scene.splats);
  const std::vector<GaussianSplat> back = import_ply(p1.string());
  export_ply(p2.string(), back);
  if (back.size() != scene.splats.size() || read_bytes(p1) != read_bytes(p2)) {
    r.ok = false;
    r.detail = fmt("splat archive round trip not bit-exact (%zu vs %zu splats)",
                   scene.splats.size(), back.size());
    return r;
  }

  const fs::path& dir = fixture_dataset("room_corner.json", 1.0, "room_corner");
  const SyntheticSceneSpec spec =
      load_scene_spec((g_fixtures / "room_corner.json").string());
  const std::vector<CameraView> expected = build_cameras(spec);
  const Dataset ds = load_dataset(dir.string());
  if (ds.views.size() != expected.size() || ds.points.empty()) {
    r.ok = false;
    r.detail = fmt("parsed %zu views and %zu points from the generated dataset",
                   ds.views.size(), ds.points.size());
    return r;
  }
  double worst = 0.0;
  for (const auto& want : expected) {
    const CameraView* got = nullptr;
    for (const auto& v : ds.views)
      if (v.name == want.name) got = &v;
    if (got == nullptr) {
      r.ok = false;
      r.detail = "view " + want.name + " missing after the COLMAP round trip";
      return r;
    }
    worst = std::max(worst, (got->rotation - want.rotation).cwiseAbs().maxCoeff());
    worst = std::max(worst, (got->translation - want.translation).cwiseAbs().maxCoeff());
  }
  r.ok = worst <= 1e-9;
  r.detail = fmt("archive round trip bit-exact; %zu poses back within %.2e",
                 expected.size(), worst);
  return r;
}

struct Criterion {
  int id;
  const char* title;
  double budget_s;  // 0: no budget
  std::function<Result()> fn;
};

}  // namespace

int main(int argc, char** argv) {
  std::string fixtures;
  int only = 0;
  CLI::App app{"acceptance checks"};
  app.add_option("--fixtures", fixtures, "Directory with the shipped scene fixtures")
      ->required();
  app.add_option("--criterion", only, "Run a single criterion (1-9; default all)");
  CLI11_PARSE(app, argc, argv);

  g_fixtures = fixtures;
  g_tmp = std::make_unique<testutil::TempDir>("acceptance");

  const std::vector<Criterion> criteria = {
      {1, "tiled rasterizer matches the reference compositor", 60.0, criterion_1},
      {2, "analytic gradients match finite differences", 300.0, criterion_2},
      {3, "texture weighting identities and threshold endpoints", 0.0, criterion_3},
      {4, "depth-ratio validation boundary and scale invariance", 0.0, criterion_4},
      {5, "geometry A/B: full pipeline beats the unvalidated control", 1200.0, criterion_5},
      {6, "texture A/B: denser detail without quality or count cost", 1200.0, criterion_6},
      {7, "normal-guided children land on the tangent plane", 0.0, criterion_7},
      {8, "manifest re-run reproduces metrics bit-exactly", 0.0, criterion_8},
      {9, "splat archive and camera formats round-trip", 0.0, criterion_9},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    if (only != 0 && c.id != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Result res;
    try {
      res = c.fn();
    } catch (const std::exception& e) {
      res.ok = false;
      res.detail = std::string("exception: ") + e.what();
    }
    const double dt =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_budget = c.budget_s == 0.0 || dt < c.budget_s;
    const bool pass = res.ok && in_budget;
    failures += pass ? 0 : 1;
    std::printf("[%s] %d. %s (%s; %.1f s%s)\n", pass ? "PASS" : "FAIL", c.id, c.title,
                res.detail.c_str(), dt, in_budget ? "" : ", OVER BUDGET");
    std::fflush(stdout);
  }
  std::printf("acceptance: %d criterion(s) failed\n", failures);
  return failures;
}
