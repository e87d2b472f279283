#pragma once

#include <cstdint>
#include <random>

#include "desksplat/core/common.hpp"

namespace desksplat {

// splitmix64 finalizer; used to decorrelate structured seeds.
inline uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct Rng {
  std::mt19937_64 gen;

  explicit Rng(uint64_t seed) : gen(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(gen);
  }
  int uniform_int(int lo, int hi) {  // inclusive bounds
    return std::uniform_int_distribution<int>(lo, hi)(gen);
  }
  double normal(double mean = 0.0, double stddev = 1.0) {
    return std::normal_distribution<double>(mean, stddev)(gen);
  }
  Vec3 normal3() { return Vec3(normal(), normal(), normal()); }
};

// Independent stream per (parent splat, iteration): child sampling stays
// reproducible no matter how parents are scheduled across threads.
inline Rng child_rng(uint64_t global_seed, uint64_t splat_id, uint64_t iteration) {
  return Rng(mix64(global_seed ^ mix64(splat_id) ^ mix64(iteration << 20)));
}

}  // namespace desksplat
