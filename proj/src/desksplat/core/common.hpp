#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace desksplat {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Vec2i = Eigen::Vector2i;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Mat23 = Eigen::Matrix<double, 2, 3>;

// Raised for malformed/unreadable input data (CLI maps it to exit code 3).
struct io_error : std::runtime_error {
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

// Raised for invalid parameters/configuration (CLI maps it to exit code 2).
struct config_error : std::runtime_error {
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// Raised when optimization diverges (non-finite loss); CLI maps it to exit code 4.
struct numeric_error : std::runtime_error {
  explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline double logit(double p) { return std::log(p / (1.0 - p)); }

}  // namespace desksplat
