// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "bhc/families.hpp"
#include "bhc/residuals.hpp"
#include "bhc/solver.hpp"

using namespace bhc;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

int failures = 0;

void criterion(int id, const char* title, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = s < budget_s;
  const bool pass = o.pass && in_time;
  failures += !pass;
  std::printf("criterion %d %s: %s  %s; %.2fs of %.0fs%s\n", id, title, pass ? "PASS" : "FAIL", o.detail.c_str(), s,
              budget_s, in_time ? "" : " (over budget)");
  std::fflush(stdout);
}

// 1: closed-form catalog plus five random bubbles on the standard grid.
Outcome closed_forms() {
  struct Entry {
    std::string label;
    ScalarField4 field;
    double a, A;
  };
  std::vector<Entry> cat;
  for (auto name : {ClassicalName::inverse_radius, ClassicalName::sphere_identity, ClassicalName::poincare_ball}) {
    const auto ex = classical_example(name);
    cat.push_back({ex.name, ex.field, ex.a, *ex.A});
  }
  const auto pw = classical_example(ClassicalName::power_alpha, -1.0);
  cat.push_back({pw.name, pw.field, pw.a, *pw.A});
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> d(0.5, 2.0), c(-1.0, 1.0);
  for (int i = 0; i < 5; ++i) {
    const double delta = d(rng);
    const Vec4 x0{c(rng), c(rng), c(rng), c(rng)};
    cat.push_back({fmt("bubble(%.3f)", delta), bubble_field<4>(delta, x0), 0.0, -2.0});
  }
  const GridSpec grid;
  double worst = 0.0, weakest_pert = 1e300;
  for (const auto& e : cat) {
    SweepParams p;
    p.a = e.a;
    p.A = e.A;
    const auto pts = verification_grid(e.field, grid);
    worst = std::fmax(worst, residual_sweep(Equation::eq4d, e.field, p, pts, grid).sup);
    worst = std::fmax(worst, residual_sweep(Equation::bfo, e.field, p, pts, grid).sup);
    const auto pert = product(e.field, perturbation_multiplier());
    const auto ppts = verification_grid(pert, grid);
    weakest_pert = std::fmin(weakest_pert, residual_sweep(Equation::eq4d, pert, p, ppts, grid).sup);
    weakest_pert = std::fmin(weakest_pert, residual_sweep(Equation::bfo, pert, p, ppts, grid).sup);
  }
  return {worst < 1e-5 && weakest_pert > 1e-2,
          fmt("%zu fields, max sup %.2e (< 1e-05), min perturbed sup %.2e (> 1e-02)", cat.size(), worst, weakest_pert)};
}

// 2: sf = lambda grad r - 3 r grad lambda with grad r by differences.
Outcome sf_identity() {
  struct Case {
    ScalarField4 f;
    double a, A;
  };
  const std::vector<Case> cases{{bubble_field<4>(1.0), 0.0, -2.0},
                                {radial_power<4>(-1.0), 0.0, -1.0},
                                {exp_first_coordinate<4>(), 0.0, -1.0},
                                {product(bubble_field<4>(1.0), perturbation_multiplier()), 0.0, -2.0},
                                {classical_example(ClassicalName::sphere_identity).field, 0.5, 0.7}};
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> r(0.5, 1.5);
  double worst = 0.0;
  for (const auto& c : cases) {
    for (int i = 0; i < 50; ++i) {
      Point4 x{g(rng), g(rng), g(rng), g(rng)};
      x = (r(rng) / norm(x)) * x;
      const auto res = [&](const Point4& y) { return eq4d_residual(c.f, c.a, c.A, y); };
      const Vec4 oracle = c.f(x) * fd_gradient4<4>(res, x, 1e-3) - 3.0 * res(x) * gradient(c.f, x);
      worst = std::fmax(worst, norm(sf_residual(c.f, EinsteinDatum(4, c.a), x) - oracle));
    }
  }
  return {worst < 1e-4, fmt("5 fields x 50 points, max deviation %.2e (< 1e-04)", worst)};
}

// 3: R_h as algebra in (A, a, lambda).
Outcome curvature_formulas() {
  bool ok = true;
  for (double eps : {-1.0, 1.0})
    for (double l : {0.25, 1.0, 3.0}) ok &= codomain_scalar_curvature(-2.0 * eps, 0.0, l) == 12.0 * eps;
  for (double l : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    ok &= codomain_scalar_curvature(-1.0, 3.0, l) == 6.0 - 6.0 / (l * l);
    ok &= codomain_scalar_curvature(-1.0, -3.0, l) == 6.0 + 6.0 / (l * l);
  }
  return {ok, "12 eps, 6 - 6/l^2 and 6 + 6/l^2 reproduced exactly"};
}

// 4: twenty random transforms per (pairing, eps) cell.
Outcome mobius_audit() {
  std::mt19937_64 rng(4);
  int wrong = 0, uncorroborated = 0;
  double nf_err = 0.0, sf_min = 1e300;
  for (const auto& P : kAllPairings) {
    for (int eps : {0, 2}) {
      for (int i = 0; i < 20; ++i) {
        const bool sphere_sphere = P == MetricPairing::sphere_sphere();
        // On S4 -> S4 alternate isometries with generic transforms.
        const bool iso = sphere_sphere && i % 2 == 0;
        const auto T = iso ? random_sphere_isometry(rng, eps) : random_mobius(rng, eps);
        const auto v = classify_mobius(T, P);
        Classification expect = Classification::not_biharmonic;
        if (P == MetricPairing::flat_flat())
          expect = eps == 0 ? Classification::harmonic : Classification::proper_biharmonic;
        else if (P == MetricPairing::flat_sphere())
          expect = Classification::proper_biharmonic;
        else if (sphere_sphere)
          expect = is_sphere_isometry(T) ? Classification::harmonic : Classification::not_biharmonic;
        if (sphere_sphere && iso != is_sphere_isometry(T)) ++wrong;
        wrong += v.classification != expect;
        uncorroborated += !v.corroborated();
        if (P == MetricPairing::flat_sphere()) {
          const auto nf = mobius_normal_form(T);
          std::uniform_real_distribution<double> u(-4.0, 4.0);
          for (int k = 0; k < 50; ++k) {
            const Point4 x{u(rng), u(rng), u(rng), u(rng)};
            if (norm(x - T.t_in) < 1e-3) continue;
            nf_err = std::fmax(nf_err, std::fabs(nf(x) - flat_sphere_factor_expanded(T, x)));
          }
        }
        if (P == MetricPairing::sphere_flat()) sf_min = std::fmin(sf_min, v.bfo_sup);
      }
    }
  }
  return {wrong == 0 && uncorroborated == 0 && nf_err < 1e-10 && sf_min > 1e-2,
          fmt("160 transforms, %d misclassified, %d uncorroborated, normal-form error %.2e (< 1e-10), "
              "min sphere-flat bfo %.2e (> 1e-02)",
              wrong, uncorroborated, nf_err, sf_min)};
}

// 5: radial IVP against the delta = 1 bubble.
Outcome radial_oracle() {
  const auto s1 = solve_radial_r4(2.0, 10.0, 1000);
  const auto s2 = solve_radial_r4(2.0, 10.0, 2000);
  const double ratio = s1.bubble_error / s2.bubble_error;
  return {s1.bubble_error < 1e-6 && ratio >= 3.5 && ratio <= 4.5,
          fmt("N=1000 error %.2e (< 1e-06), doubling ratio %.3f (3.5..4.5)", s1.bubble_error, ratio)};
}

// 6: constant branch, bifurcation points, continuation from k = 5.05.
Outcome s4_solver() {
  double const_err = 0.0;
  for (double k : {2.5, 3.0, 5.0, 9.0}) {
    const auto b = solve_s4(k, [k](double) { return std::sqrt(k); });
    for (double u : b.profile.values) const_err = std::fmax(const_err, std::fabs(u - std::sqrt(k)));
  }
  const auto found = detect_bifurcations(1.0, 10.0, 400);
  double bif_err = 0.0;
  for (int l = 1; l <= 3; ++l) {
    double best = 1e300;
    for (double k : found) best = std::fmin(best, std::fabs(k - bifurcation_point(l)));
    bif_err = std::fmax(bif_err, best);
  }
  const auto run = continue_branch(2, 5.05, 6.0, 20);
  bool monotone = true, positive = true;
  double res = 0.0, prev = 0.0;
  for (const auto& p : run.points) {
    res = std::fmax(res, p.residual);
    monotone &= p.amplitude > prev && p.amplitude > 1e-6;
    prev = p.amplitude;
    for (double u : p.profile.values) positive &= u > 0.0;
  }
  const bool ok = const_err < 1e-12 && bif_err < 0.05 && run.points.size() >= 10 && res < 1e-9 && monotone && positive;
  return {ok, fmt("constant error %.1e (< 1e-12), bifurcation error %.3f (< 0.05), %zu branch points, "
                  "max residual %.2e (< 1e-09), amplitude %s",
                  const_err, bif_err, run.points.size(), res, monotone ? "strictly increasing" : "not monotone")};
}

// 7: Sobolev quotient of bubbles and of a Gaussian.
Outcome sobolev() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> d(0.5, 2.0), c(-0.5, 0.5);
  const double S = best_sobolev_constant(4);
  double lo = 1e300, hi = 0.0;
  for (int i = 0; i < 5; ++i) {
    const double q = sobolev_quotient_tensor(bubble_field<4>(d(rng), Vec4{c(rng), c(rng), c(rng), c(rng)})).quotient;
    lo = std::fmin(lo, q);
    hi = std::fmax(hi, q);
  }
  FieldSpec<4> g;
  g.name = "gaussian";
  g.value = [](const Vec4& x) { return std::exp(-norm2(x)); };
  g.gradient = [](const Vec4& x) { return (-2.0 * std::exp(-norm2(x))) * x; };
  const double qg = sobolev_quotient_tensor(ScalarField4(g)).quotient;
  const double spread = (hi - lo) / lo;
  const double to_best = std::fmax(std::fabs(hi - S), std::fabs(lo - S)) / S;
  return {spread < 5e-3 && to_best < 5e-3 && qg >= 1.01 * hi,
          fmt("bubble spread %.2e (< 5e-03), deviation from %.4f %.2e, gaussian %.4f (>= 1%% above)", spread, S,
              to_best, qg)};
}

// 8: the periodic problem on the flat torus.
Outcome torus() {
  const auto seed = [](double t) { return 1.0 + 0.3 * std::sin(t); };
  const auto bad = solve_torus(0.0, -1.0, seed);
  double min_cube = 1e300;
  for (const auto& it : bad.history) min_cube = std::fmin(min_cube, std::fabs(it.cube_integral));
  const auto good = solve_torus(0.0, 0.0, seed);
  const auto [lo, hi] = std::minmax_element(good.profile.values.begin(), good.profile.values.end());
  const bool ok = !bad.converged && !bad.history.empty() && min_cube > 0.1 && good.converged &&
                  good.profile.residual_sup < 1e-10 && *hi - *lo < 1e-10;
  return {ok, fmt("A=-1 %s, min |int l^3| %.3f (> 0.1); A=0 residual %.2e (< 1e-10), spread %.1e",
                  bad.converged ? "converged" : "failed", min_cube, good.profile.residual_sup, *hi - *lo)};
}

// 9: positivity threshold in dimension four.
Outcome aubin() {
  bool ok = true;
  for (double a : {-3.0, -0.1, 0.0, 0.1, 3.0}) ok &= aubin_condition(a, EinsteinDatum(4, a)) == (a < 0.0);
  return {ok, "true exactly for a < 0 over {-3, -0.1, 0, 0.1, 3}"};
}

}  // namespace

int main() {
  criterion(1, "closed-form residuals", 10, closed_forms);
  criterion(2, "sf identity", 5, sf_identity);
  criterion(3, "codomain curvature", 1, curvature_formulas);
  criterion(4, "mobius audit", 30, mobius_audit);
  criterion(5, "radial bubble oracle", 5, radial_oracle);
  criterion(6, "S4 solver", 60, s4_solver);
  criterion(7, "sobolev quotient", 10, sobolev);
  criterion(8, "torus obstruction", 5, torus);
  criterion(9, "aubin condition", 1, aubin);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
