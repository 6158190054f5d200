#pragma once

// Finite-difference solvers for Delta l - a l = A l^3 in three symmetry
// classes: radial on R^4 (a = 0, A = -2), axisymmetric on the unit S^4 in the
// form -Delta u + k u = u^3, and 2 pi-periodic on a flat torus (a = 0).

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bhc {

enum class ProfileTag { r4_bubble, s4_axisym, torus_1d };
std::string_view to_string(ProfileTag t);

struct RadialProfile {
  ProfileTag tag = ProfileTag::r4_bubble;
  std::vector<double> grid;    // r, theta or periodic angle
  std::vector<double> values;  // > 0
  double k = 0.0;              // s4_axisym
  double a = 0.0;              // torus_1d
  double A = 0.0;              // torus_1d
  double residual_sup = 0.0;
  std::size_t iterations = 0;

  std::size_t intervals() const { return grid.empty() ? 0 : grid.size() - 1; }
};

/// Residual sup-norm recomputed from the stored values with the profile's
/// own discrete operator.
double recompute_residual(const RadialProfile& p);

// --- radial bubble on R^4 ---------------------------------------------------

struct RadialSolution {
  RadialProfile profile;
  /// delta = 2 / v_center of the bubble the profile should reproduce.
  double delta = 0.0;
  /// sup_i |v_i - bubble(r_i)|.
  double bubble_error = 0.0;
  /// |v'(r_max) + 2 v(r_max) / r_max| with a one-sided second-order v'.
  double far_field_defect = 0.0;
};

/// v'' + (3/r) v' + 2 v^3 = 0 on [0, r_max] with v(0) = v_center, v'(0) = 0,
/// N uniform intervals. The row at r = 0 uses the limit 4 v''(0).
RadialSolution solve_radial_r4(double v_center, double r_max = 10.0, std::size_t N = 1000);

// --- axisymmetric S^4 --------------------------------------------------------

inline constexpr std::size_t kS4DefaultN = 400;
inline constexpr double kS4DefaultTol = 1e-10;

/// theta_i = i pi / N, i = 0..N.
std::vector<double> s4_grid(std::size_t N);

/// -u'' - 3 cot(theta) u' + k u - u^3 at every node; -4u'' + k u - u^3 at the
/// poles (Neumann reflection).
std::vector<double> s4_axisym_operator(std::span<const double> u, double k);

/// Tridiagonal Jacobian of s4_axisym_operator with respect to u.
struct Tridiagonal {
  std::vector<double> sub;   // size n-1: J(i+1, i)
  std::vector<double> diag;  // size n
  std::vector<double> sup;   // size n-1: J(i, i+1)

  std::size_t size() const { return diag.size(); }
};
Tridiagonal s4_jacobian(std::span<const double> u, double k);

/// Zonal eigenfunction C_l^{3/2}(cos theta) / C_l^{3/2}(1) of the S^4
/// Laplacian, eigenvalue -l(l+3); equals 1 at theta = 0.
double zonal_mode(int ell, double theta);

struct BranchPoint {
  double k = 0.0;
  RadialProfile profile;
  double arclength = 0.0;
  double amplitude = 0.0;        // sup u - inf u
  double gradient_energy = 0.0;  // int_{S^4} |grad u|^2
  double residual = 0.0;
  std::size_t iterations = 0;
};

/// Fills amplitude, gradient energy and residual from the profile.
BranchPoint make_branch_point(double k, RadialProfile profile, double arclength = 0.0);

double gradient_energy(std::span<const double> u);

struct NewtonOptions {
  std::size_t max_iterations = 50;
  std::size_t max_halvings = 30;
};

/// Damped Newton for the axisymmetric operator from `init` (N + 1 values).
/// Throws ConvergenceError or PositivityError.
BranchPoint solve_s4(double k, std::span<const double> init, double tol = kS4DefaultTol,
                     const NewtonOptions& opt = {});
/// Convenience: initial profile sampled from a function of theta.
BranchPoint solve_s4(double k, const std::function<double(double)>& init, std::size_t N = kS4DefaultN,
                     double tol = kS4DefaultTol, const NewtonOptions& opt = {});

/// k_l = l(l+3)/2, where 2k meets the eigenvalue l(l+3).
double bifurcation_point(int ell);

/// Smallest singular value of a tridiagonal matrix by inverse iteration on
/// J^T J.
double min_singular_value(const Tridiagonal& J);
double jacobian_min_singular_value(double k, std::size_t N = kS4DefaultN);

/// Local minima of k -> sigma_min(J(sqrt k)) on [k_lo, k_hi]: scan with
/// `step`, then golden-section refinement.
std::vector<double> detect_bifurcations(double k_lo, double k_hi, std::size_t N = kS4DefaultN, double step = 0.05);

enum class BranchStatus { completed, reached_target, positivity_lost, convergence_failed, left_window };
std::string_view to_string(BranchStatus s);

struct ContinuationOptions {
  std::size_t N = kS4DefaultN;
  double tol = kS4DefaultTol;
  double k_min = 2.0;
  double k_max = 12.0;
  double grow = 1.3;
  double shrink = 0.5;
  std::size_t fast_iterations = 3;
  std::size_t max_halvings = 10;
  /// A branch point counts as nonconstant above this amplitude.
  double min_amplitude = 1e-6;
};

struct BranchRun {
  int ell = 0;
  double k_from = 0.0;
  double k_to = 0.0;
  std::vector<BranchPoint> points;
  BranchStatus status = BranchStatus::completed;
  std::string message;
  /// Seed that produced the first point: sqrt(k) + seed_eta * zonal_mode.
  double seed_eta = 0.0;
};

/// Pseudo-arclength continuation of the nonconstant branch bifurcating at
/// k_ell, `steps` points starting at k_from and heading toward k_to.
/// Throws BranchError if no nonconstant first point is found.
BranchRun continue_branch(int ell, double k_from, double k_to, std::size_t steps,
                          const ContinuationOptions& opt = {});

/// Re-solve of a branch point on the grid with 2N intervals from its
/// cubic interpolant.
struct RefineCheck {
  double interpolated_residual = 0.0;
  double refined_residual = 0.0;
  /// sup |refined - interpolated| at the refined nodes.
  double solution_shift = 0.0;
  std::size_t iterations = 0;
};
RefineCheck refine_check(const BranchPoint& p, double tol = kS4DefaultTol);

/// Cubic interpolation of a profile on theta_i = i pi / N onto 2N intervals.
std::vector<double> s4_refine_profile(std::span<const double> u);

// --- flat torus --------------------------------------------------------------

inline constexpr std::size_t kTorusDefaultN = 256;

struct TorusIterate {
  std::size_t iteration = 0;
  double residual_sup = 0.0;       // sup |l'' - A l^3|
  double second_difference_integral = 0.0;  // h sum l''_i
  double cube_integral = 0.0;      // h sum l_i^3
  double multiplier = 0.0;
  double min_value = 0.0;
};

struct TorusResult {
  RadialProfile profile;
  bool converged = false;
  std::string status;
  /// Lagrange multiplier of the mean constraint: l'' - A l^3 + mu = 0.
  double multiplier = 0.0;
  /// A * int l^3 over the period at the final iterate.
  double obstruction = 0.0;
  std::vector<TorusIterate> history;
};

/// Newton on l'' = A l^3 over one period 2 pi with N nodes, bordered by the
/// mean constraint mean(l) = mean(init). a must be 0.
TorusResult solve_torus(double a, double A, std::span<const double> init, double tol = 1e-10,
                        const NewtonOptions& opt = {});
TorusResult solve_torus(double a, double A, const std::function<double(double)>& init,
                        std::size_t N = kTorusDefaultN, double tol = 1e-10, const NewtonOptions& opt = {});

std::vector<double> torus_grid(std::size_t N);
/// l''_i - A l_i^3 with periodic wrap.
std::vector<double> torus_operator(std::span<const double> l, double A);

}  // namespace bhc
