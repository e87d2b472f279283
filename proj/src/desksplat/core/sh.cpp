#include "desksplat/core/sh.hpp"

namespace desksplat {

namespace {
constexpr double kC1 = 0.4886025119029199;
constexpr double kC2[5] = {1.0925484305920792, -1.0925484305920792,
                           0.31539156525252005, -1.0925484305920792,
                           0.5462742152960396};
constexpr double kC3[7] = {-0.5900435899266435, 2.890611442640554,
                           -0.4570457994644658, 0.3731763325901154,
                           -0.4570457994644658, 1.445305721320277,
                           -0.5900435899266435};
}  // namespace

void sh_basis(const Vec3& dir, int degree, double* b, Vec3* db) {
  if (degree < 0 || degree > kMaxShDegree)
    throw config_error("sh_basis: degree out of range");
  const double x = dir.x(), y = dir.y(), z = dir.z();

  b[0] = kSh0;
  if (db) db[0].setZero();
  if (degree < 1) return;

  b[1] = -kC1 * y;
  b[2] = kC1 * z;
  b[3] = -kC1 * x;
  if (db) {
    db[1] = Vec3(0, -kC1, 0);
    db[2] = Vec3(0, 0, kC1);
    db[3] = Vec3(-kC1, 0, 0);
  }
  if (degree < 2) return;

  const double xx = x * x, yy = y * y, zz = z * z;
  const double xy = x * y, yz = y * z, xz = x * z;
  b[4] = kC2[0] * xy;
  b[5] = kC2[1] * yz;
  b[6] = kC2[2] * (2.0 * zz - xx - yy);
  b[7] = kC2[3] * xz;
  b[8] = kC2[4] * (xx - yy);
  if (db) {
    db[4] = kC2[0] * Vec3(y, x, 0);
    db[5] = kC2[1] * Vec3(0, z, y);
    db[6] = kC2[2] * Vec3(-2.0 * x, -2.0 * y, 4.0 * z);
    db[7] = kC2[3] * Vec3(z, 0, x);
    db[8] = kC2[4] * Vec3(2.0 * x, -2.0 * y, 0);
  }
  if (degree < 3) return;

  b[9] = kC3[0] * y * (3.0 * xx - yy);
  b[10] = kC3[1] * xy * z;
  b[11] = kC3[2] * y * (4.0 * zz - xx - yy);
  b[12] = kC3[3] * z * (2.0 * zz - 3.0 * xx - 3.0 * yy);
  b[13] = kC3[4] * x * (4.0 * zz - xx - yy);
  b[14] = kC3[5] * z * (xx - yy);
  b[15] = kC3[6] * x * (xx - 3.0 * yy);
  if (db) {
    db[9] = kC3[0] * Vec3(6.0 * xy, 3.0 * xx - 3.0 * yy, 0);
    db[10] = kC3[1] * Vec3(yz, xz, xy);
    db[11] = kC3[2] * Vec3(-2.0 * xy, 4.0 * zz - xx - 3.0 * yy, 8.0 * yz);
    db[12] = kC3[3] * Vec3(-6.0 * xz, -6.0 * yz, 6.0 * zz - 3.0 * xx - 3.0 * yy);
    db[13] = kC3[4] * Vec3(4.0 * zz - 3.0 * xx - yy, -2.0 * xy, 8.0 * xz);
    db[14] = kC3[5] * Vec3(2.0 * xz, -2.0 * yz, xx - yy);
    db[15] = kC3[6] * Vec3(3.0 * xx - 3.0 * yy, -6.0 * xy, 0);
  }
}

ShEval eval_sh(const ShMat& sh, int degree, const Vec3& dir_unit) {
  double b[kShCoeffCount];
  sh_basis(dir_unit, degree, b);
  const int n = sh_coeff_count(degree);
  ShEval out;
  for (int ch = 0; ch < 3; ++ch) {
    double v = 0.5;
    for (int i = 0; i < n; ++i) v += b[i] * sh(i, ch);
    out.clamped[ch] = v < 0.0;
    out.rgb[ch] = out.clamped[ch] ? 0.0 : v;
  }
  return out;
}

void eval_sh_backward(const ShMat& sh, int degree, const Vec3& dir_unit,
                      const std::array<bool, 3>& clamped, const Vec3& d_rgb,
                      ShMat* d_sh, Vec3* d_dir) {
  double b[kShCoeffCount];
  Vec3 db[kShCoeffCount];
  sh_basis(dir_unit, degree, b, db);
  const int n = sh_coeff_count(degree);
  for (int ch = 0; ch < 3; ++ch) {
    if (clamped[ch]) continue;
    const double g = d_rgb[ch];
    if (g == 0.0) continue;
    for (int i = 0; i < n; ++i) {
      if (d_sh) (*d_sh)(i, ch) += g * b[i];
      if (d_dir) *d_dir += g * sh(i, ch) * db[i];
    }
  }
}

}  // namespace desksplat
