#include <cmath>

#include "bhc/errors.hpp"
#include "bhc/families.hpp"
#include "bhc/kernels.hpp"
#include "bhc/solver.hpp"

namespace bhc {

namespace {

struct RadialStencil {
  std::vector<double> lower, upper;
};

// v'' + (3/r) v' in flux form on interior nodes.
RadialStencil radial_stencil(const std::vector<double>& r, double h) {
  const std::size_t n = r.size();
  RadialStencil s{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  const double ih2 = 1.0 / (h * h);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double c = 3.0 / (2.0 * h * r[i]);
    s.lower[i] = ih2 - c;
    s.upper[i] = ih2 + c;
  }
  return s;
}

// Rows 0..N-1: 4 v''(0) + 2 v0^3 at the center, then the interior stencil.
std::vector<double> radial_rows(std::span<const double> v, const std::vector<double>& r) {
  const std::size_t n = v.size();
  const double h = r[1] - r[0];
  const auto s = radial_stencil(r, h);
  std::vector<double> out(n, 0.0);
  kernels::stencil3(s.lower, s.upper, v, 0.0, 2.0, out);
  out[0] = 8.0 * (v[1] - v[0]) / (h * h) + 2.0 * v[0] * v[0] * v[0];
  out.pop_back();  // no equation at r_max
  return out;
}

}  // namespace

std::string_view to_string(ProfileTag t) {
  switch (t) {
    case ProfileTag::r4_bubble:
      return "r4_bubble";
    case ProfileTag::s4_axisym:
      return "s4_axisym";
    case ProfileTag::torus_1d:
      return "torus_1d";
  }
  return "unknown";
}

double recompute_residual(const RadialProfile& p) {
  switch (p.tag) {
    case ProfileTag::r4_bubble:
      return kernels::max_abs(radial_rows(p.values, p.grid));
    case ProfileTag::s4_axisym:
      return kernels::max_abs(s4_axisym_operator(p.values, p.k));
    case ProfileTag::torus_1d:
      return kernels::max_abs(torus_operator(p.values, p.A));
  }
  return 0.0;
}

RadialSolution solve_radial_r4(double v_center, double r_max, std::size_t N) {
  if (!(v_center > 0.0)) throw std::invalid_argument("solve_radial_r4: v_center must be positive");
  if (!(r_max > 0.0)) throw std::invalid_argument("solve_radial_r4: r_max must be positive");
  if (N < 100) throw std::invalid_argument("solve_radial_r4: N must be >= 100");

  RadialSolution out;
  RadialProfile& p = out.profile;
  p.tag = ProfileTag::r4_bubble;
  const double h = r_max / static_cast<double>(N);
  p.grid.resize(N + 1);
  for (std::size_t i = 0; i <= N; ++i) p.grid[i] = h * static_cast<double>(i);
  const auto s = radial_stencil(p.grid, h);

  // The discrete system is lower triangular in (v_1, ..., v_N): row i fixes
  // v_{i+1} linearly, so forward substitution is its exact solution.
  std::vector<double>& v = p.values;
  v.assign(N + 1, 0.0);
  v[0] = v_center;
  v[1] = v_center - 0.25 * v_center * v_center * v_center * h * h;
  for (std::size_t i = 1; i < N; ++i) {
    const double vi = v[i];
    v[i + 1] = vi - (s.lower[i] * (v[i - 1] - vi) + 2.0 * vi * vi * vi) / s.upper[i];
    if (!(v[i + 1] > 0.0))
      throw PositivityError("solve_radial_r4: profile lost positivity at r = " + std::to_string(p.grid[i + 1]), i,
                            v[i + 1], v);
  }
  p.iterations = 1;
  p.residual_sup = recompute_residual(p);

  out.delta = 2.0 / v_center;
  const Bubble b(4, out.delta, {0.0, 0.0, 0.0, 0.0});
  for (std::size_t i = 0; i <= N; ++i) {
    const double x[4] = {p.grid[i], 0.0, 0.0, 0.0};
    out.bubble_error = std::fmax(out.bubble_error, std::fabs(v[i] - b.value(x)));
  }
  const double dv = (3.0 * v[N] - 4.0 * v[N - 1] + v[N - 2]) / (2.0 * h);
  out.far_field_defect = std::fabs(dv + 2.0 * v[N] / r_max);
  return out;
}

}  // namespace bhc
