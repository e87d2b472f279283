#include "desksplat/synth/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace desksplat {

double psnr(const Image& a, const Image& b) {
  if (a.width != b.width || a.height != b.height || a.channels != b.channels) {
    throw config_error("psnr: image shapes differ");
  }
  if (a.data.empty()) throw config_error("psnr: empty images");
  double acc = 0.0;
  for (size_t i = 0; i < a.data.size(); ++i) {
    const double d = a.data[i] - b.data[i];
    acc += d * d;
  }
  const double mse = acc / static_cast<double>(a.data.size());
  if (mse <= 0.0) return 99.0;
  return std::min(99.0, -10.0 * std::log10(mse));
}

double distance_to_face(const Vec3& p, const SurfaceFace& f) {
  const Vec3 v = p - f.origin;
  const double g00 = f.edge0.squaredNorm();
  const double g11 = f.edge1.squaredNorm();
  const double g01 = f.edge0.dot(f.edge1);
  const double det = g00 * g11 - g01 * g01;
  if (det > 1e-300) {
    // Oblique (Gram) solve: exact even when the edges are not orthogonal.
    const double r0 = v.dot(f.edge0), r1 = v.dot(f.edge1);
    const double s = (g11 * r0 - g01 * r1) / det;
    const double t = (g00 * r1 - g01 * r0) / det;
    if (s >= 0.0 && s <= 1.0 && t >= 0.0 && t <= 1.0)
      return (p - (f.origin + s * f.edge0 + t * f.edge1)).norm();
  }
  // The foot of the perpendicular falls outside (or the face is degenerate):
  // by convexity the nearest point lies on one of the four rim segments.
  const auto to_segment = [&p](const Vec3& a, const Vec3& d) {
    const double len2 = d.squaredNorm();
    const double t = len2 > 0.0 ? std::clamp((p - a).dot(d) / len2, 0.0, 1.0) : 0.0;
    return (p - (a + t * d)).norm();
  };
  double best = to_segment(f.origin, f.edge0);
  best = std::min(best, to_segment(f.origin, f.edge1));
  best = std::min(best, to_segment(f.origin + f.edge1, f.edge0));
  best = std::min(best, to_segment(f.origin + f.edge0, f.edge1));
  return best;
}

double distance_to_surfaces(const Vec3& p, const std::vector<SurfaceFace>& faces) {
  double best = std::numeric_limits<double>::infinity();
  for (const SurfaceFace& f : faces) best = std::min(best, distance_to_face(p, f));
  return best;
}

SurfaceFitStats surface_fit_error(const std::vector<Vec3>& points,
                                  const std::vector<SurfaceFace>& faces,
                                  double tolerance) {
  if (faces.empty()) throw config_error("surface_fit_error: no faces");
  SurfaceFitStats st;
  st.count = points.size();
  if (points.empty()) return st;

  std::vector<double> d(points.size());
  double sum = 0.0;
  size_t above = 0;
  for (size_t i = 0; i < points.size(); ++i) {
    d[i] = distance_to_surfaces(points[i], faces);
    sum += d[i];
    if (d[i] > tolerance) ++above;
  }
  std::sort(d.begin(), d.end());
  const size_t n = d.size();
  st.mean = sum / static_cast<double>(n);
  st.median = (n % 2 == 1) ? d[n / 2] : 0.5 * (d[n / 2 - 1] + d[n / 2]);
  // Nearest-rank percentile.
  const size_t rank = static_cast<size_t>(
      std::ceil(0.95 * static_cast<double>(n)));
  st.p95 = d[std::min(n, std::max<size_t>(rank, 1)) - 1];
  st.fraction_above = static_cast<double>(above) / static_cast<double>(n);
  return st;
}

double density_ratio(size_t n_textured, double area_textured,
                     size_t n_textureless, double area_textureless) {
  if (!(area_textured > 0.0) || !(area_textureless > 0.0)) {
    throw config_error("density_ratio: region areas must be positive");
  }
  if (n_textureless == 0) {
    return n_textured == 0 ? 1.0 : std::numeric_limits<double>::infinity();
  }
  const double dt = static_cast<double>(n_textured) / area_textured;
  const double dl = static_cast<double>(n_textureless) / area_textureless;
  return dt / dl;
}

}  // namespace desksplat
