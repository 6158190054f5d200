#pragma once

// Pointwise residuals of the biharmonicity equations for a conformal map with
// conformal factor lambda (phi^* h = lambda^2 g) on an Einstein domain
// (Ricci = a g), plus the curvature law, the tension field norm, the Aubin
// condition and the isoparametric reduction away from dimension four.

#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "bhc/fields.hpp"
#include "bhc/grid.hpp"

namespace bhc {

enum class Equation { bfo, sf, eq4d, curvature_law, isoparametric };

std::string_view to_string(Equation e);
std::optional<Equation> parse_equation(std::string_view s);

/// Default pass thresholds: analytic-assisted and pure finite differences.
inline constexpr double kResidualTol = 1e-6;
inline constexpr double kResidualTolFd = 1e-4;
/// Steps for the third-derivative route of bfo/sf.
inline constexpr double kThirdDerivStep = 1e-4;
inline constexpr double kThirdDerivStepFd = 1e-3;

struct ResidualReport {
  Equation equation = Equation::eq4d;
  std::vector<double> per_point;
  double sup = 0.0;
  double rms = 0.0;
  GridSpec grid;
  /// Points where evaluation raised a domain error; not part of the norms.
  std::size_t excluded = 0;
  std::vector<std::pair<std::string, double>> params;

  std::size_t n_points() const { return per_point.size(); }
};

/// Builds a report from per-point magnitudes (sup and RMS via the kernels).
ResidualReport make_report(Equation eq, std::vector<double> magnitudes, const GridSpec& grid, std::size_t excluded,
                           std::vector<std::pair<std::string, double>> params);

namespace detail {

template <std::size_t N>
struct LogJet {
  double lambda;
  Vec<N> grad_lambda;
  Mat<N> hess_lambda;
  Vec<N> grad_log;  // grad ln lambda
  Mat<N> hess_log;  // Hessian of ln lambda
};

template <std::size_t N>
LogJet<N> log_jet(const ScalarField<N>& lambda, const Vec<N>& x, double fallback_step) {
  const Jet<N> j = jet(lambda, x, fallback_step);
  if (!(j.value > 0.0)) throw DomainError(lambda.name() + ": conformal factor must be positive");
  LogJet<N> L{j.value, j.grad, j.hess, j.grad / j.value, {}};
  L.hess_log = (1.0 / j.value) * j.hess - (1.0 / (j.value * j.value)) * outer(j.grad, j.grad);
  return L;
}

template <std::size_t N>
bool analytic_pair(const ScalarField<N>& f) {
  return f.has_gradient() && f.has_hessian();
}

}  // namespace detail

/// Biharmonicity residual of a conformal map from a flat Einstein domain:
///   grad(Delta ln l) - {2 Delta ln l + (n-2)|grad ln l|^2} grad ln l
///     + 2a grad ln l + ((6-n)/2) grad |grad ln l|^2.
/// Third derivatives: five-point central differences of the analytic
/// Delta ln lambda (h = 1e-4), or of a finite-difference one (h = 1e-3) when
/// the field has no analytic Hessian.
template <std::size_t N>
Vec<N> bfo_residual(const ScalarField<N>& lambda, const EinsteinDatum& datum, const Vec<N>& x) {
  if (datum.n != static_cast<int>(N)) throw std::invalid_argument("bfo_residual: datum dimension != field dimension");
  const bool analytic = detail::analytic_pair(lambda);
  const double h = analytic ? kThirdDerivStep : kThirdDerivStepFd;
  lambda.require_regular(x, std::fmax(kSingularGuard, 3.0 * h));
  const auto L = detail::log_jet(lambda, x, h);
  const auto lap_log = [&](const Vec<N>& y) { return trace(detail::log_jet(lambda, y, h).hess_log); };
  const Vec<N> grad_lap_log = fd_gradient4<N>(lap_log, x, h);
  const double dl = trace(L.hess_log);
  const double g2 = norm2(L.grad_log);
  const double n = static_cast<double>(N);
  return grad_lap_log - (2.0 * dl + (n - 2.0) * g2) * L.grad_log + (2.0 * datum.a) * L.grad_log +
         (6.0 - n) * (L.hess_log * L.grad_log);
}

/// The same residual for a four-dimensional domain with conformally flat
/// metric g = mu^2 dx^2 (e.g. the stereographic chart of S^4 with a = 3).
/// Returned as coordinate components of the vector field; see
/// bfo_residual_norm for the g-norm.
Vec4 bfo_residual(const ScalarField4& lambda, const EinsteinDatum& datum, const Point4& x, const ConformalMetric& g);

/// |bfo residual|_g.
double bfo_residual_norm(const ScalarField4& lambda, const EinsteinDatum& datum, const Point4& x,
                         const ConformalMetric& g = ConformalMetric::flat());

/// Einstein form of the biharmonic equation for a flat domain:
///   grad(l Delta l + a l^2 - ((n-4)/2)|grad l|^2) - 4 (Delta l) grad l.
template <std::size_t N>
Vec<N> sf_residual(const ScalarField<N>& lambda, const EinsteinDatum& datum, const Vec<N>& x) {
  if (datum.n != static_cast<int>(N)) throw std::invalid_argument("sf_residual: datum dimension != field dimension");
  const bool analytic = detail::analytic_pair(lambda);
  const double h = analytic ? kThirdDerivStep : kThirdDerivStepFd;
  lambda.require_regular(x, std::fmax(kSingularGuard, 3.0 * h));
  const Jet<N> j = jet(lambda, x, h);
  if (!(j.value > 0.0)) throw DomainError(lambda.name() + ": conformal factor must be positive");
  const auto lap = [&](const Vec<N>& y) { return trace(jet(lambda, y, h).hess); };
  const Vec<N> grad_lap = fd_gradient4<N>(lap, x, h);
  const double dl = trace(j.hess);
  const double n = static_cast<double>(N);
  // grad(l Dl) = Dl grad l + l grad Dl; grad(a l^2) = 2 a l grad l; grad|grad l|^2 = 2 H grad l
  return j.value * grad_lap + (dl - 4.0 * dl + 2.0 * datum.a * j.value) * j.grad - (n - 4.0) * (j.hess * j.grad);
}

/// Delta l - a l - A l^3 (flat domain).
template <std::size_t N>
double eq4d_residual(const ScalarField<N>& lambda, double a, double A, const Vec<N>& x) {
  const double l = lambda(x);
  if (!(l > 0.0)) throw DomainError(lambda.name() + ": conformal factor must be positive");
  const auto mode = lambda.has_hessian() ? DiffMode::analytic() : DiffMode::fd();
  return laplacian_flat(lambda, x, mode) - a * l - A * l * l * l;
}

/// Delta_g l - a l - A l^3 for a conformally flat four-dimensional domain.
double eq4d_residual(const ScalarField4& lambda, double a, double A, const Point4& x, const ConformalMetric& g);

struct ConstantA {
  double value = 0.0;
  double fit_residual = 0.0;

  static ConstantA exact(double A) { return {A, 0.0}; }
};

/// Least-squares A minimising sum (Delta_g l - a l - A l^3)^2 over the samples;
/// fit_residual is the RMS of the remaining misfit.
ConstantA estimate_A(const ScalarField4& lambda, double a, std::span<const Point4> samples,
                     const ConformalMetric& g = ConformalMetric::flat());

/// Scalar curvature of the codomain forced by 6A + 2a/l^2 + R_h = 0.
double codomain_scalar_curvature(double A, double a, double lambda_value);

/// R_h as a constant or as a function of the point.
template <std::size_t N>
using CurvatureSpec = std::variant<double, std::function<double(const Vec<N>&)>>;

/// 2(n-1) Delta l - l R_g + l^3 R_h + ((n-1)(n-4)/l)|grad l|^2.
template <std::size_t N>
double curvature_law_residual(const ScalarField<N>& lambda, double R_g, const CurvatureSpec<N>& R_h,
                              const Vec<N>& x) {
  const double n = static_cast<double>(N);
  const Jet<N> j = jet(lambda, x, kDefaultFdStep);
  if (!(j.value > 0.0)) throw DomainError(lambda.name() + ": conformal factor must be positive");
  const double rh = std::holds_alternative<double>(R_h) ? std::get<double>(R_h)
                                                         : std::get<std::function<double(const Vec<N>&)>>(R_h)(x);
  const double l = j.value;
  return 2.0 * (n - 1.0) * trace(j.hess) - l * R_g + l * l * l * rh + ((n - 1.0) * (n - 4.0) / l) * norm2(j.grad);
}

/// |tau(phi)|_h = (n-2) l |grad ln l|_g for a flat domain.
template <std::size_t N>
double tension_norm(const ScalarField<N>& lambda, const Vec<N>& x) {
  const double l = lambda(x);
  if (!(l > 0.0)) throw DomainError(lambda.name() + ": conformal factor must be positive");
  const auto mode = lambda.has_gradient() ? DiffMode::analytic() : DiffMode::fd();
  return (static_cast<double>(N) - 2.0) * l * norm(gradient(lambda, x, mode) / l);
}

double tension_norm(const ScalarField4& lambda, const Point4& x, const ConformalMetric& g);

/// Aubin's sufficient condition k < (n-2)/(4(n-1)) R_g with R_g = n a.
bool aubin_condition(double k, const EinsteinDatum& datum);

/// Profile u(s) with derivative, for the isoparametric reduction.
struct Profile {
  std::function<double(double)> u;
  std::function<double(double)> du;
};

/// (Delta l - u'(l), |grad l|^2 - (2/(n-4))(l u'(l) - 4u(l) + a l^2)), n = N != 4.
template <std::size_t N>
std::pair<double, double> isoparametric_residuals(const ScalarField<N>& lambda, double a, const Profile& profile,
                                                  const Vec<N>& x) {
  if constexpr (N == 4) {
    throw UnsupportedError("isoparametric_residuals: the reduction is for n != 4");
  } else {
    const Jet<N> j = jet(lambda, x, kDefaultFdStep);
    const double l = j.value;
    const double n = static_cast<double>(N);
    const double du = profile.du(l);
    return {trace(j.hess) - du, norm2(j.grad) - (2.0 / (n - 4.0)) * (l * du - 4.0 * profile.u(l) + a * l * l)};
  }
}

/// Per-point residual sweep of a four-dimensional conformal factor.
struct SweepParams {
  double a = 0.0;
  double A = 0.0;
  /// Codomain scalar curvature for the curvature law; defaults to the value
  /// forced by (a, A).
  std::optional<double> R_h;
  ConformalMetric domain = ConformalMetric::flat();
};

ResidualReport residual_sweep(Equation eq, const ScalarField4& lambda, const SweepParams& params,
                              std::span<const Point4> points, const GridSpec& grid);

}  // namespace bhc
