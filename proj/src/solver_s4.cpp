#include <algorithm>
#include <cmath>
#include <numbers>

#include "bhc/errors.hpp"
#include "bhc/kernels.hpp"
#include "bhc/linalg.hpp"
#include "bhc/solver.hpp"

namespace bhc {

namespace {

struct PolarStencil {
  std::vector<double> lower, upper;
  double pole = 0.0;  // coefficient of (u_neighbour - u_pole)
};

// -u'' - 3 cot(theta) u' in flux form; poles use -4u'' with reflection.
PolarStencil polar_stencil(std::size_t n) {
  const std::size_t N = n - 1;
  const double h = std::numbers::pi / static_cast<double>(N);
  const double ih2 = 1.0 / (h * h);
  PolarStencil s{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), -8.0 * ih2};
  for (std::size_t i = 1; i < N; ++i) {
    const double theta = h * static_cast<double>(i);
    const double c = 3.0 * std::cos(theta) / (std::sin(theta) * 2.0 * h);
    s.lower[i] = -ih2 + c;
    s.upper[i] = -ih2 - c;
  }
  s.upper[0] = s.pole;
  s.lower[N] = s.pole;
  return s;
}

void require_profile(std::span<const double> u) {
  if (u.size() < 5) throw std::invalid_argument("s4: profile needs at least 5 nodes");
}

double l2(std::span<const double> x) { return std::sqrt(kernels::sum_squares(x)); }

double min_value(std::span<const double> x) { return *std::min_element(x.begin(), x.end()); }

}  // namespace

std::vector<double> s4_grid(std::size_t N) {
  std::vector<double> t(N + 1);
  for (std::size_t i = 0; i <= N; ++i) t[i] = std::numbers::pi * static_cast<double>(i) / static_cast<double>(N);
  return t;
}

std::vector<double> s4_axisym_operator(std::span<const double> u, double k) {
  require_profile(u);
  const std::size_t n = u.size();
  const auto s = polar_stencil(n);
  std::vector<double> out(n);
  kernels::stencil3(s.lower, s.upper, u, k, -1.0, out);
  const auto pole_row = [&](std::size_t i, std::size_t j) {
    const double ui = u[i];
    return (s.pole * (u[j] - ui) + k * ui) + -1.0 * ((ui * ui) * ui);
  };
  out[0] = pole_row(0, 1);
  out[n - 1] = pole_row(n - 1, n - 2);
  return out;
}

Tridiagonal s4_jacobian(std::span<const double> u, double k) {
  require_profile(u);
  const std::size_t n = u.size();
  const auto s = polar_stencil(n);
  Tridiagonal J{std::vector<double>(n - 1), std::vector<double>(n), std::vector<double>(n - 1)};
  kernels::stencil3_jacobian_diag(s.lower, s.upper, u, k, -1.0, J.diag);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    J.sup[i] = s.upper[i];
    J.sub[i] = s.lower[i + 1];
  }
  J.diag[0] = (k - s.pole) - 3.0 * u[0] * u[0];
  J.diag[n - 1] = (k - s.pole) - 3.0 * u[n - 1] * u[n - 1];
  return J;
}

double zonal_mode(int ell, double theta) {
  if (ell < 0) throw std::invalid_argument("zonal_mode: ell must be >= 0");
  const double x = std::cos(theta);
  // Gegenbauer recurrence, parameter 3/2.
  double c0 = 1.0, c1 = 3.0 * x;
  if (ell == 0) return 1.0;
  for (int m = 2; m <= ell; ++m) {
    const double c2 = (2.0 * x * (m + 0.5) * c1 - (m + 1.0) * c0) / m;
    c0 = c1;
    c1 = c2;
  }
  return c1 / ((ell + 1.0) * (ell + 2.0) / 2.0);
}

double gradient_energy(std::span<const double> u) {
  const std::size_t N = u.size() - 1;
  const double h = std::numbers::pi / static_cast<double>(N);
  double s = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double d = (u[i + 1] - u[i]) / h;
    const double sn = std::sin(h * (static_cast<double>(i) + 0.5));
    s += d * d * sn * sn * sn * h;
  }
  return 2.0 * std::numbers::pi * std::numbers::pi * s;  // |S^3| = 2 pi^2
}

BranchPoint make_branch_point(double k, RadialProfile profile, double arclength) {
  BranchPoint b;
  b.k = k;
  b.arclength = arclength;
  const auto [lo, hi] = std::minmax_element(profile.values.begin(), profile.values.end());
  b.amplitude = *hi - *lo;
  b.gradient_energy = gradient_energy(profile.values);
  b.residual = profile.residual_sup;
  b.iterations = profile.iterations;
  b.profile = std::move(profile);
  return b;
}

BranchPoint solve_s4(double k, std::span<const double> init, double tol, const NewtonOptions& opt) {
  if (!(k > 0.0)) throw std::invalid_argument("solve_s4: k must be positive");
  require_profile(init);
  if (!(min_value(init) > 0.0)) throw std::invalid_argument("solve_s4: initial profile must be positive");
  std::vector<double> u(init.begin(), init.end());
  std::vector<double> F = s4_axisym_operator(u, k);
  std::size_t it = 0;
  for (;; ++it) {
    if (kernels::max_abs(F) < tol) break;
    if (it == opt.max_iterations)
      throw ConvergenceError("solve_s4: no convergence after " + std::to_string(it) + " Newton iterations", it,
                             kernels::max_abs(F), u);
    std::vector<double> du(F.size());
    for (std::size_t i = 0; i < F.size(); ++i) du[i] = -F[i];
    try {
      TridiagonalLU(s4_jacobian(u, k)).solve(du);
    } catch (const IllConditionedError&) {
      throw ConvergenceError("solve_s4: singular Jacobian", it, kernels::max_abs(F), u);
    }
    const double r0 = l2(F);
    double t = 1.0;
    bool positive_seen = false;
    std::vector<double> trial(u.size());
    std::size_t halvings = 0;
    for (;; ++halvings) {
      for (std::size_t i = 0; i < u.size(); ++i) trial[i] = u[i] + t * du[i];
      if (min_value(trial) > 0.0) {
        positive_seen = true;
        auto Ft = s4_axisym_operator(trial, k);
        if (l2(Ft) < r0) {
          u.swap(trial);
          F.swap(Ft);
          break;
        }
      }
      if (halvings == opt.max_halvings) {
        if (!positive_seen)
          throw PositivityError("solve_s4: every damped step leaves the positive cone", it, kernels::max_abs(F), u);
        throw ConvergenceError("solve_s4: damped Newton step failed to reduce the residual", it,
                               kernels::max_abs(F), u);
      }
      t *= 0.5;
    }
  }
  RadialProfile p;
  p.tag = ProfileTag::s4_axisym;
  p.grid = s4_grid(u.size() - 1);
  p.values = std::move(u);
  p.k = k;
  p.residual_sup = kernels::max_abs(F);
  p.iterations = it;
  return make_branch_point(k, std::move(p));
}

BranchPoint solve_s4(double k, const std::function<double(double)>& init, std::size_t N, double tol,
                     const NewtonOptions& opt) {
  const auto theta = s4_grid(N);
  std::vector<double> u(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) u[i] = init(theta[i]);
  return solve_s4(k, u, tol, opt);
}

double bifurcation_point(int ell) {
  if (ell < 1) throw std::invalid_argument("bifurcation_point: ell must be >= 1");
  return ell * (ell + 3) / 2.0;
}

double min_singular_value(const Tridiagonal& J) {
  const std::size_t n = J.size();
  std::optional<TridiagonalLU> lu, lut;
  try {
    lu.emplace(J);
    lut.emplace(transpose(J));
  } catch (const IllConditionedError&) {
    return 0.0;
  }
  // Deterministic start with components along every mode.
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = 1.0 + 0.5 * std::sin(1.3 * static_cast<double>(i) + 0.7);
  double nx = l2(x);
  for (auto& v : x) v /= nx;
  double lambda = 0.0;
  for (int it = 0; it < 500; ++it) {
    std::vector<double> z = x;
    lut->solve(z);  // J^-T x
    lu->solve(z);   // (J^T J)^-1 x
    const double rq = kernels::dot(x, z);
    const double nz = l2(z);
    for (std::size_t i = 0; i < n; ++i) x[i] = z[i] / nz;
    if (!std::isfinite(nz)) return 0.0;
    if (it > 2 && std::fabs(rq - lambda) <= 1e-13 * std::fabs(rq)) {
      lambda = rq;
      break;
    }
    lambda = rq;
  }
  return 1.0 / std::sqrt(lambda);
}

double jacobian_min_singular_value(double k, std::size_t N) {
  if (!(k > 0.0)) throw std::invalid_argument("jacobian_min_singular_value: k must be positive");
  const std::vector<double> u(N + 1, std::sqrt(k));
  return min_singular_value(s4_jacobian(u, k));
}

std::vector<double> detect_bifurcations(double k_lo, double k_hi, std::size_t N, double step) {
  if (!(k_hi > k_lo) || !(step > 0.0)) throw std::invalid_argument("detect_bifurcations: empty scan");
  std::vector<double> ks, sig;
  for (double k = k_lo; k <= k_hi + 1e-12; k = k_lo + step * static_cast<double>(ks.size())) {
    ks.push_back(k);
    sig.push_back(jacobian_min_singular_value(k, N));
  }
  std::vector<double> minima;
  const auto f = [&](double k) { return jacobian_min_singular_value(k, N); };
  for (std::size_t i = 1; i + 1 < ks.size(); ++i) {
    if (!(sig[i] < sig[i - 1] && sig[i] <= sig[i + 1])) continue;
    double a = ks[i - 1], b = ks[i + 1];
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > 1e-7) {
      if (fc < fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - g * (b - a);
        fc = f(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + g * (b - a);
        fd = f(d);
      }
    }
    minima.push_back(0.5 * (a + b));
  }
  return minima;
}

std::vector<double> s4_refine_profile(std::span<const double> u) {
  require_profile(u);
  const std::size_t N = u.size() - 1;
  // Even reflection across both poles.
  const auto at = [&](std::ptrdiff_t i) {
    const auto n = static_cast<std::ptrdiff_t>(N);
    if (i < 0) i = -i;
    if (i > n) i = 2 * n - i;
    return u[static_cast<std::size_t>(i)];
  };
  std::vector<double> r(2 * N + 1);
  for (std::size_t i = 0; i <= N; ++i) r[2 * i] = u[i];
  for (std::size_t i = 0; i < N; ++i) {
    const auto j = static_cast<std::ptrdiff_t>(i);
    r[2 * i + 1] = (-at(j - 1) + 9.0 * at(j) + 9.0 * at(j + 1) - at(j + 2)) / 16.0;
  }
  return r;
}

RefineCheck refine_check(const BranchPoint& p, double tol) {
  RefineCheck out;
  const auto fine = s4_refine_profile(p.profile.values);
  out.interpolated_residual = kernels::max_abs(s4_axisym_operator(fine, p.k));
  const BranchPoint q = solve_s4(p.k, fine, tol);
  out.refined_residual = q.residual;
  out.iterations = q.iterations;
  for (std::size_t i = 0; i < fine.size(); ++i)
    out.solution_shift = std::fmax(out.solution_shift, std::fabs(q.profile.values[i] - fine[i]));
  return out;
}

}  // namespace bhc
