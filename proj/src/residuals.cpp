#include "bhc/residuals.hpp"

#include <array>

#include "bhc/kernels.hpp"

namespace bhc {

namespace {

constexpr std::array<std::pair<Equation, std::string_view>, 5> kEquationNames{{
    {Equation::bfo, "bfo"},
    {Equation::sf, "sf"},
    {Equation::eq4d, "eq4d"},
    {Equation::curvature_law, "curvature_law"},
    {Equation::isoparametric, "isoparametric"},
}};

}  // namespace

std::string_view to_string(Equation e) {
  for (const auto& [eq, name] : kEquationNames)
    if (eq == e) return name;
  return "unknown";
}

std::optional<Equation> parse_equation(std::string_view s) {
  for (const auto& [eq, name] : kEquationNames)
    if (name == s) return eq;
  return std::nullopt;
}

ResidualReport make_report(Equation eq, std::vector<double> magnitudes, const GridSpec& grid, std::size_t excluded,
                           std::vector<std::pair<std::string, double>> params) {
  ResidualReport r;
  r.equation = eq;
  r.per_point = std::move(magnitudes);
  r.grid = grid;
  r.excluded = excluded;
  r.params = std::move(params);
  if (!r.per_point.empty()) {
    r.sup = kernels::max_abs(r.per_point);
    r.rms = std::sqrt(kernels::sum_squares(r.per_point) / static_cast<double>(r.per_point.size()));
  }
  return r;
}

Vec4 bfo_residual(const ScalarField4& lambda, const EinsteinDatum& datum, const Point4& x, const ConformalMetric& g) {
  if (g.is_flat()) return bfo_residual<4>(lambda, datum, x);
  if (datum.n != 4) throw UnsupportedError("bfo_residual: curved domains are supported in dimension four only");
  const bool analytic = detail::analytic_pair(lambda);
  const double h = analytic ? kThirdDerivStep : kThirdDerivStepFd;
  lambda.require_regular(x, std::fmax(kSingularGuard, 3.0 * h));

  // Laplace-Beltrami of ln lambda for g = mu^2 dx^2.
  const auto lb_log = [&](const Point4& y) {
    const auto L = detail::log_jet(lambda, y, h);
    const double mu = g.factor(y);
    return (trace(L.hess_log) + 2.0 * dot(g.grad_log_factor(y), L.grad_log)) / (mu * mu);
  };
  const auto L = detail::log_jet(lambda, x, h);
  const double mu = g.factor(x);
  const double inv_mu2 = 1.0 / (mu * mu);
  const Vec4 glm = g.grad_log_factor(x);
  const double g2 = norm2(L.grad_log);  // flat |grad ln lambda|^2
  const double lb = lb_log(x);
  const Vec4 grad_lb = fd_gradient4<4>(lb_log, x, h);
  // flat gradient of |grad ln lambda|_g^2 = mu^-2 |grad ln lambda|^2
  const Vec4 grad_norm_g = inv_mu2 * (2.0 * (L.hess_log * L.grad_log) - (2.0 * g2) * glm);
  const Vec4 w = grad_lb - (2.0 * lb + 2.0 * inv_mu2 * g2) * L.grad_log + (2.0 * datum.a) * L.grad_log + grad_norm_g;
  // grad_g f = mu^-2 grad f
  return inv_mu2 * w;
}

double bfo_residual_norm(const ScalarField4& lambda, const EinsteinDatum& datum, const Point4& x,
                         const ConformalMetric& g) {
  if (g.is_flat()) return norm(bfo_residual<4>(lambda, datum, x));
  return g.factor(x) * norm(bfo_residual(lambda, datum, x, g));
}

double eq4d_residual(const ScalarField4& lambda, double a, double A, const Point4& x, const ConformalMetric& g) {
  if (g.is_flat()) return eq4d_residual<4>(lambda, a, A, x);
  const double l = lambda(x);
  if (!(l > 0.0)) throw DomainError(lambda.name() + ": conformal factor must be positive");
  const auto mode = lambda.has_hessian() ? DiffMode::analytic() : DiffMode::fd();
  return laplace_beltrami(lambda, g, x, mode) - a * l - A * l * l * l;
}

ConstantA estimate_A(const ScalarField4& lambda, double a, std::span<const Point4> samples, const ConformalMetric& g) {
  if (samples.size() < 2) throw std::invalid_argument("estimate_A: need at least two samples");
  const auto mode = lambda.has_hessian() ? DiffMode::analytic() : DiffMode::fd();
  std::vector<double> b, c;
  b.reserve(samples.size());
  c.reserve(samples.size());
  for (const auto& x : samples) {
    const double l = lambda(x);
    if (!(l > 0.0)) throw DomainError(lambda.name() + ": conformal factor must be positive");
    b.push_back(laplace_beltrami(lambda, g, x, mode) - a * l);
    c.push_back(l * l * l);
  }
  const double cc = kernels::sum_squares(c);
  if (kernels::max_abs(c) < 1e-12 || !(cc > 0.0))
    throw IllConditionedError("estimate_A: lambda^3 vanishes at every sample");
  ConstantA out;
  out.value = kernels::dot(b, c) / cc;
  std::vector<double> misfit(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) misfit[i] = b[i] - out.value * c[i];
  out.fit_residual = std::sqrt(kernels::sum_squares(misfit) / static_cast<double>(misfit.size()));
  return out;
}

double codomain_scalar_curvature(double A, double a, double lambda_value) {
  if (!(lambda_value > 0.0)) throw DomainError("codomain_scalar_curvature: lambda must be positive");
  return -6.0 * A - 2.0 * a / (lambda_value * lambda_value);
}

double tension_norm(const ScalarField4& lambda, const Point4& x, const ConformalMetric& g) {
  if (g.is_flat()) return tension_norm<4>(lambda, x);
  const double l = lambda(x);
  if (!(l > 0.0)) throw DomainError(lambda.name() + ": conformal factor must be positive");
  const auto mode = lambda.has_gradient() ? DiffMode::analytic() : DiffMode::fd();
  // |grad ln l|_g = mu^-1 |grad ln l|
  return 2.0 * l * norm(gradient(lambda, x, mode) / l) / g.factor(x);
}

bool aubin_condition(double k, const EinsteinDatum& datum) {
  if (datum.n < 4) throw UnsupportedError("aubin_condition: requires n >= 4");
  const double n = datum.n;
  return k < (n - 2.0) / (4.0 * (n - 1.0)) * datum.scalar_curvature();
}

ResidualReport residual_sweep(Equation eq, const ScalarField4& lambda, const SweepParams& p,
                              std::span<const Point4> points, const GridSpec& grid) {
  if (eq == Equation::isoparametric)
    throw UnsupportedError("residual_sweep: the isoparametric reduction does not apply in dimension four");
  if (eq == Equation::sf && !p.domain.is_flat())
    throw UnsupportedError("residual_sweep: sf residual is implemented for flat domains");
  const EinsteinDatum datum(4, p.a);
  std::vector<double> mags;
  mags.reserve(points.size());
  std::size_t excluded = 0;
  for (const auto& x : points) {
    try {
      switch (eq) {
        case Equation::eq4d:
          mags.push_back(std::fabs(eq4d_residual(lambda, p.a, p.A, x, p.domain)));
          break;
        case Equation::bfo:
          mags.push_back(bfo_residual_norm(lambda, datum, x, p.domain));
          break;
        case Equation::sf:
          mags.push_back(norm(sf_residual<4>(lambda, datum, x)));
          break;
        case Equation::curvature_law: {
          const double l = lambda(x);
          if (!(l > 0.0)) throw DomainError("curvature law: lambda must be positive");
          const double rh = p.R_h ? *p.R_h : codomain_scalar_curvature(p.A, p.a, l);
          const auto mode = lambda.has_hessian() ? DiffMode::analytic() : DiffMode::fd();
          mags.push_back(std::fabs(6.0 * laplace_beltrami(lambda, p.domain, x, mode) - 4.0 * p.a * l + l * l * l * rh));
          break;
        }
        case Equation::isoparametric:
          break;
      }
    } catch (const DomainError&) {
      ++excluded;
    }
  }
  std::vector<std::pair<std::string, double>> params{{"n", 4.0}, {"a", p.a}, {"A", p.A}};
  if (p.R_h) params.emplace_back("R_h", *p.R_h);
  params.emplace_back("spherical_domain", p.domain.kind() == ConformalMetric::Kind::spherical ? 1.0 : 0.0);
  return make_report(eq, std::move(mags), grid, excluded, std::move(params));
}

}  // namespace bhc
