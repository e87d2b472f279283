#pragma once

#include <array>

#include "desksplat/core/common.hpp"

namespace desksplat {

constexpr int kMaxShDegree = 3;
constexpr int kShCoeffCount = (kMaxShDegree + 1) * (kMaxShDegree + 1);  // 16
constexpr double kSh0 = 0.28209479177387814;  // Y00

// Rows are coefficients (dc first), columns are RGB channels.
using ShMat = Eigen::Matrix<double, kShCoeffCount, 3>;

inline int sh_coeff_count(int degree) { return (degree + 1) * (degree + 1); }

// Real SH basis in the splatting convention/ordering. `db` (optional, size
// sh_coeff_count(degree)) receives d(basis_i)/d(dir).
void sh_basis(const Vec3& dir, int degree, double* b, Vec3* db = nullptr);

struct ShEval {
  Vec3 rgb;                      // after +0.5 offset and clamp at 0
  std::array<bool, 3> clamped;   // channel hit the clamp (gradient gate)
};

// Per-channel dot(basis, coeffs) + 0.5, clamped at 0.
ShEval eval_sh(const ShMat& sh, int degree, const Vec3& dir_unit);

// Chain rule for eval_sh: scatters d_rgb into coefficient and direction
// gradients. Clamped channels contribute nothing.
void eval_sh_backward(const ShMat& sh, int degree, const Vec3& dir_unit,
                      const std::array<bool, 3>& clamped, const Vec3& d_rgb,
                      ShMat* d_sh, Vec3* d_dir);

}  // namespace desksplat
