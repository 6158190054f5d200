#pragma once

// Quasi-random verification grids: Halton points in a ball, with declared
// singularities and the domain boundary cut out.

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "bhc/fields.hpp"

namespace bhc {

struct GridSpec {
  std::size_t count = 200;
  double radius = 5.0;
  double exclusion = 0.05;
  /// Halton index offset; the sequence starts at index seed + 1.
  std::uint64_t seed = 0;

  static constexpr const char* sequence = "halton-2-3-5-7-11-13";
};

/// Radical inverse of `index` in the given base.
double radical_inverse(std::uint64_t index, unsigned base);

inline constexpr std::array<unsigned, 6> kHaltonBases{2, 3, 5, 7, 11, 13};

/// Halton points of the cube [-R, R]^N restricted to |x| <= R, skipping points
/// within `exclusion` of the field's singular set or domain boundary. R is
/// clipped to the field's domain radius.
template <std::size_t N>
std::vector<Vec<N>> verification_grid(const ScalarField<N>& f, const GridSpec& spec = {}) {
  static_assert(N <= kHaltonBases.size());
  if (spec.count == 0 || !(spec.radius > 0.0)) throw std::invalid_argument("verification_grid: empty grid");
  std::vector<Vec<N>> pts;
  pts.reserve(spec.count);
  const double R = std::fmin(spec.radius, f.domain_radius());
  const std::uint64_t max_draws = 1000 * spec.count + 100000;
  for (std::uint64_t i = spec.seed + 1; pts.size() < spec.count; ++i) {
    if (i - spec.seed > max_draws)
      throw std::runtime_error("verification_grid: domain too small for the requested point count");
    Vec<N> x;
    for (std::size_t d = 0; d < N; ++d) x[d] = R * (2.0 * radical_inverse(i, kHaltonBases[d]) - 1.0);
    if (norm(x) > R) continue;
    if (!f.is_regular(x, spec.exclusion)) continue;
    pts.push_back(x);
  }
  return pts;
}

}  // namespace bhc
