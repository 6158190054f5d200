#pragma once

// Shared helpers for the unit tests.

#include <random>
#include <vector>

#include "bhc/vec.hpp"

namespace bhc::test {

/// Points with |x| in [r_lo, r_hi], directions uniform on S^3.
inline std::vector<Point4> shell_points(std::size_t n, double r_lo, double r_hi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(r_lo, r_hi);
  std::vector<Point4> pts;
  while (pts.size() < n) {
    Point4 x{g(rng), g(rng), g(rng), g(rng)};
    const double len = norm(x);
    if (len < 1e-3) continue;
    pts.push_back((u(rng) / len) * x);
  }
  return pts;
}

}  // namespace bhc::test
