#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "hyoc/types.hpp"

namespace hyoc {

/// Deterministic PRNG stream: mt19937_64 seeded by (seed, FNV-1a(name)).
///
/// Named streams used by the toolkit:
///   "system/<i>"        random DC system i of a benchmark
///   "x0/<i>/<N>"        initial-state draws for system i, horizon N
///   "multistart"        random input trajectories for solve_local restarts
///   "generator"         random_dc_system piece entries
class Rng {
 public:
  Rng(std::uint64_t seed, std::string_view stream) : engine_(mix(seed, stream)) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }

  MatrixXd uniform_matrix(Eigen::Index rows, Eigen::Index cols, double lo, double hi) {
    MatrixXd M(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) M(i, j) = uniform(lo, hi);
    return M;
  }
  VectorXd uniform_vector(Eigen::Index n, double lo, double hi) { return uniform_matrix(n, 1, lo, hi); }

  std::mt19937_64& engine() { return engine_; }

  static std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 1099511628211ULL;
    }
    return h;
  }

 private:
  static std::uint64_t mix(std::uint64_t seed, std::string_view stream) {
    std::uint64_t z = seed ^ fnv1a(stream);
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::mt19937_64 engine_;
};

}  // namespace hyoc
