#include <algorithm>
#include <cmath>

#include "bhc/errors.hpp"
#include "bhc/kernels.hpp"
#include "bhc/linalg.hpp"
#include "bhc/solver.hpp"

namespace bhc {

namespace {

// Point on the extended (u, k) space with the inner product
// <x, y> = u.u' / n + k k'.
struct State {
  std::vector<double> u;
  double k = 0.0;
};

double scaled_dot(const State& a, const State& b) {
  return kernels::dot(a.u, b.u) / static_cast<double>(a.u.size()) + a.k * b.k;
}

State difference(const State& a, const State& b) {
  State d{std::vector<double>(a.u.size()), a.k - b.k};
  for (std::size_t i = 0; i < a.u.size(); ++i) d.u[i] = a.u[i] - b.u[i];
  return d;
}

double scaled_norm(const State& a) { return std::sqrt(scaled_dot(a, a)); }

struct Corrected {
  State x;
  double residual = 0.0;
  std::size_t iterations = 0;
};

// Newton on [F(u, k); <t, x - pred>] with the bordered elimination
//   J a = -F, J b = F_k = u, dk = (-g - t~.a) / (t_k - t~.b), du = a - dk b.
std::optional<Corrected> correct(const State& pred, const State& t, double tol, std::size_t max_iterations) {
  const std::size_t n = pred.u.size();
  State x = pred;
  std::vector<double> tu(n);
  for (std::size_t i = 0; i < n; ++i) tu[i] = t.u[i] / static_cast<double>(n);
  for (std::size_t it = 0; it <= max_iterations; ++it) {
    const auto F = s4_axisym_operator(x.u, x.k);
    const double g = scaled_dot(t, difference(x, pred));
    const double r = kernels::max_abs(F);
    if (r < tol && std::fabs(g) < 1e-12) return Corrected{std::move(x), r, it};
    if (it == max_iterations || !std::isfinite(r)) break;
    std::vector<double> a(n), b(x.u);
    for (std::size_t i = 0; i < n; ++i) a[i] = -F[i];
    try {
      const TridiagonalLU lu(s4_jacobian(x.u, x.k));
      lu.solve(a);
      lu.solve(b);
    } catch (const IllConditionedError&) {
      return std::nullopt;
    }
    const double den = t.k - kernels::dot(tu, b);
    if (den == 0.0) return std::nullopt;
    const double dk = (-g - kernels::dot(tu, a)) / den;
    State next = x;
    next.k += dk;
    for (std::size_t i = 0; i < n; ++i) next.u[i] += a[i] - dk * b[i];
    if (!(*std::min_element(next.u.begin(), next.u.end()) > 0.0)) return std::nullopt;
    x = std::move(next);
  }
  return std::nullopt;
}

BranchPoint to_point(State x, double arclength, double residual, std::size_t iterations) {
  RadialProfile p;
  p.tag = ProfileTag::s4_axisym;
  p.grid = s4_grid(x.u.size() - 1);
  p.k = x.k;
  p.values = std::move(x.u);
  p.residual_sup = residual;
  p.iterations = iterations;
  return make_branch_point(p.k, std::move(p), arclength);
}

}  // namespace

std::string_view to_string(BranchStatus s) {
  switch (s) {
    case BranchStatus::completed:
      return "completed";
    case BranchStatus::reached_target:
      return "reached_target";
    case BranchStatus::positivity_lost:
      return "positivity_lost";
    case BranchStatus::convergence_failed:
      return "convergence_failed";
    case BranchStatus::left_window:
      return "left_window";
  }
  return "unknown";
}

BranchRun continue_branch(int ell, double k_from, double k_to, std::size_t steps, const ContinuationOptions& opt) {
  if (steps < 1) throw std::invalid_argument("continue_branch: steps must be >= 1");
  if (!(k_from >= opt.k_min && k_from <= opt.k_max))
    throw std::invalid_argument("continue_branch: k_from outside the continuation window");
  BranchRun run;
  run.ell = ell;
  run.k_from = k_from;
  run.k_to = k_to;

  // First point: natural solve from sqrt(k) + eta * mode, both signs.
  const auto theta = s4_grid(opt.N);
  std::optional<BranchPoint> first;
  for (double eta : {0.1, 0.3, 0.05}) {
    for (double sign : {1.0, -1.0}) {
      std::vector<double> init(theta.size());
      for (std::size_t i = 0; i < theta.size(); ++i)
        init[i] = std::sqrt(k_from) + sign * eta * zonal_mode(ell, theta[i]);
      if (!(*std::min_element(init.begin(), init.end()) > 0.0)) continue;
      try {
        BranchPoint p = solve_s4(k_from, init, opt.tol);
        if (p.amplitude > opt.min_amplitude) {
          first = std::move(p);
          run.seed_eta = sign * eta;
          break;
        }
      } catch (const SolverError&) {
      }
    }
    if (first) break;
  }
  if (!first)
    throw BranchError("continue_branch: no nonconstant solution near k = " + std::to_string(k_from), 0, 0.0);
  run.points.push_back(std::move(*first));
  if (steps == 1) return run;

  const double dir = k_to >= k_from ? 1.0 : -1.0;
  const auto past_target = [&](double k) { return dir * (k - k_to) >= 0.0; };

  // Second point by a natural step; its distance sets the nominal arclength step.
  double dk = (k_to - k_from) / static_cast<double>(steps - 1);
  std::optional<BranchPoint> second;
  for (int attempt = 0; attempt < 6 && !second; ++attempt, dk *= 0.5) {
    try {
      BranchPoint p = solve_s4(k_from + dk, run.points.back().profile.values, opt.tol);
      if (p.amplitude > opt.min_amplitude) second = std::move(p);
    } catch (const SolverError&) {
    }
  }
  if (!second) {
    run.status = BranchStatus::convergence_failed;
    run.message = "natural step from the first point failed";
    return run;
  }
  State prev{run.points.back().profile.values, run.points.back().k};
  State cur{second->profile.values, second->k};
  const double ds_nominal = scaled_norm(difference(cur, prev));
  second->arclength = ds_nominal;
  run.points.push_back(std::move(*second));
  double ds = ds_nominal;
  double s = ds_nominal;

  while (run.points.size() < steps) {
    if (past_target(cur.k)) {
      run.status = BranchStatus::reached_target;
      return run;
    }
    State t = difference(cur, prev);
    const double tn = scaled_norm(t);
    for (auto& v : t.u) v /= tn;
    t.k /= tn;

    std::optional<Corrected> c;
    std::size_t halvings = 0;
    for (; halvings <= opt.max_halvings; ++halvings, ds *= opt.shrink) {
      State pred{cur.u, cur.k + ds * t.k};
      for (std::size_t i = 0; i < pred.u.size(); ++i) pred.u[i] += ds * t.u[i];
      c = correct(pred, t, opt.tol, 20);
      if (c) break;
    }
    if (!c) {
      run.status = BranchStatus::convergence_failed;
      run.message = "corrector failed after " + std::to_string(opt.max_halvings) + " step reductions";
      return run;
    }
    if (c->x.k < opt.k_min || c->x.k > opt.k_max) {
      run.status = BranchStatus::left_window;
      run.message = "branch left the window [" + std::to_string(opt.k_min) + ", " + std::to_string(opt.k_max) + "]";
      return run;
    }
    const double step = scaled_norm(difference(c->x, cur));
    if (past_target(c->x.k)) {
      // Land exactly on k_to from the chord between the last two points.
      const double w = (k_to - cur.k) / (c->x.k - cur.k);
      std::vector<double> guess(cur.u.size());
      for (std::size_t i = 0; i < guess.size(); ++i) guess[i] = cur.u[i] + w * (c->x.u[i] - cur.u[i]);
      try {
        BranchPoint p = solve_s4(k_to, guess, opt.tol);
        p.arclength = s + w * step;
        run.points.push_back(std::move(p));
        run.status = BranchStatus::reached_target;
      } catch (const PositivityError& e) {
        run.status = BranchStatus::positivity_lost;
        run.message = e.what();
      } catch (const SolverError& e) {
        run.status = BranchStatus::convergence_failed;
        run.message = e.what();
      }
      return run;
    }
    s += step;
    BranchPoint p = to_point(c->x, s, c->residual, c->iterations);
    if (p.amplitude <= opt.min_amplitude) {
      run.status = BranchStatus::convergence_failed;
      run.message = "corrector fell back onto the constant branch";
      return run;
    }
    run.points.push_back(std::move(p));
    prev = std::move(cur);
    cur = std::move(c->x);
    if (c->iterations <= opt.fast_iterations) ds = std::min(ds * opt.grow, ds_nominal);
  }
  run.status = BranchStatus::completed;
  return run;
}

}  // namespace bhc
