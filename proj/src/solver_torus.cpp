#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "bhc/errors.hpp"
#include "bhc/kernels.hpp"
#include "bhc/solver.hpp"

namespace bhc {

namespace {

double step_of(std::size_t N) { return 2.0 * std::numbers::pi / static_cast<double>(N); }

// h sum_i l''_i, summed as differences of the periodic fluxes so that the
// telescoping is exact up to the rounding of the fluxes themselves.
double second_difference_integral(std::span<const double> l) {
  const std::size_t N = l.size();
  const double h = step_of(N);
  double s = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double fwd = l[(i + 1) % N] - l[i];
    const double bwd = l[i] - l[(i + N - 1) % N];
    s += fwd - bwd;
  }
  return s / h;
}

double cube_integral(std::span<const double> l) {
  double s = 0.0;
  for (double v : l) s += v * v * v;
  return step_of(l.size()) * s;
}

double mean(std::span<const double> l) {
  double s = 0.0;
  for (double v : l) s += v;
  return s / static_cast<double>(l.size());
}

}  // namespace

std::vector<double> torus_grid(std::size_t N) {
  std::vector<double> t(N + 1);
  for (std::size_t i = 0; i <= N; ++i) t[i] = step_of(N) * static_cast<double>(i);
  return t;
}

std::vector<double> torus_operator(std::span<const double> l, double A) {
  const std::size_t N = l.size();
  if (N < 3) throw std::invalid_argument("torus_operator: need at least 3 nodes");
  const double h = step_of(N);
  std::vector<double> padded(N + 2), out(N + 2);
  padded[0] = l[N - 1];
  std::copy(l.begin(), l.end(), padded.begin() + 1);
  padded[N + 1] = l[0];
  const std::vector<double> c(N + 2, 1.0 / (h * h));
  kernels::stencil3(c, c, padded, 0.0, -A, out);
  return {out.begin() + 1, out.end() - 1};
}

TorusResult solve_torus(double a, double A, std::span<const double> init, double tol, const NewtonOptions& opt) {
  if (a != 0.0) throw UnsupportedError("solve_torus: the flat torus has a = 0");
  const std::size_t N = init.size();
  if (N < 3) throw std::invalid_argument("solve_torus: need at least 3 nodes");
  if (!(*std::min_element(init.begin(), init.end()) > 0.0))
    throw std::invalid_argument("solve_torus: initial profile must be positive");
  const double h = step_of(N);
  const double m0 = mean(init);

  TorusResult out;
  std::vector<double> l(init.begin(), init.end());
  double mu = 0.0;

  // Bordered system: G = l'' - A l^3 + mu = 0, mean(l) = m0.
  const auto bordered = [&](const std::vector<double>& v, double m) {
    auto G = torus_operator(v, A);
    for (auto& g : G) g += m;
    G.push_back(mean(v) - m0);
    return G;
  };
  const auto record = [&](std::size_t it) {
    TorusIterate r;
    r.iteration = it;
    r.residual_sup = kernels::max_abs(torus_operator(l, A));
    r.second_difference_integral = second_difference_integral(l);
    r.cube_integral = cube_integral(l);
    r.multiplier = mu;
    r.min_value = *std::min_element(l.begin(), l.end());
    out.history.push_back(r);
  };

  std::vector<double> G = bordered(l, mu);
  record(0);
  std::size_t it = 0;
  bool stalled = false;
  while (kernels::max_abs(G) >= tol) {
    if (it == opt.max_iterations) {
      stalled = true;
      break;
    }
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(N + 1), static_cast<Eigen::Index>(N + 1));
    const double ih2 = 1.0 / (h * h);
    for (std::size_t i = 0; i < N; ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      J(r, static_cast<Eigen::Index>((i + N - 1) % N)) += ih2;
      J(r, static_cast<Eigen::Index>((i + 1) % N)) += ih2;
      J(r, r) += -2.0 * ih2 - 3.0 * A * l[i] * l[i];
      J(r, static_cast<Eigen::Index>(N)) = 1.0;
      J(static_cast<Eigen::Index>(N), r) = 1.0 / static_cast<double>(N);
    }
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(N + 1));
    for (std::size_t i = 0; i <= N; ++i) rhs(static_cast<Eigen::Index>(i)) = -G[i];
    const Eigen::VectorXd d = J.partialPivLu().solve(rhs);
    if (!d.allFinite()) {
      stalled = true;
      break;
    }
    const double r0 = std::sqrt(kernels::sum_squares(G));
    double t = 1.0;
    bool accepted = false;
    for (std::size_t k = 0; k <= opt.max_halvings; ++k, t *= 0.5) {
      std::vector<double> trial(N);
      for (std::size_t i = 0; i < N; ++i) trial[i] = l[i] + t * d(static_cast<Eigen::Index>(i));
      if (!(*std::min_element(trial.begin(), trial.end()) > 0.0)) continue;
      const double mt = mu + t * d(static_cast<Eigen::Index>(N));
      auto Gt = bordered(trial, mt);
      if (std::sqrt(kernels::sum_squares(Gt)) < r0) {
        l.swap(trial);
        mu = mt;
        G.swap(Gt);
        accepted = true;
        break;
      }
    }
    ++it;
    if (!accepted) {
      stalled = true;
      break;
    }
    record(it);
  }

  out.multiplier = mu;
  out.obstruction = A * cube_integral(l);
  RadialProfile& p = out.profile;
  p.tag = ProfileTag::torus_1d;
  p.grid = torus_grid(N);
  p.grid.pop_back();
  p.values = l;
  p.a = a;
  p.A = A;
  p.iterations = it;
  p.residual_sup = kernels::max_abs(torus_operator(l, A));
  out.converged = !stalled && p.residual_sup < tol;
  if (out.converged)
    out.status = "converged";
  else if (stalled)
    out.status = "no convergence: damped Newton stalled";
  else
    out.status = "obstructed: the mean constraint needs multiplier " + std::to_string(mu) +
                 " = A * mean(l^3); no periodic solution of l'' = A l^3 with this mean";
  return out;
}

TorusResult solve_torus(double a, double A, const std::function<double(double)>& init, std::size_t N, double tol,
                        const NewtonOptions& opt) {
  std::vector<double> l(N);
  for (std::size_t i = 0; i < N; ++i) l[i] = init(step_of(N) * static_cast<double>(i));
  return solve_torus(a, A, l, tol, opt);
}

}  // namespace bhc
