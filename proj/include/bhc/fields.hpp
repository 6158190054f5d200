#pragma once

// Scalar fields on (subdomains of) R^N with optional analytic derivatives,
// flat differential operators, the conformally flat Laplace-Beltrami
// operator in dimension four, and finite-difference cross-checks.
//
// Sign convention: the Laplacian is div grad (negative spectrum).

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bhc/errors.hpp"
#include "bhc/vec.hpp"

namespace bhc {

inline constexpr double kDefaultFdStep = 1e-4;
/// Evaluation closer than this to a declared singularity is rejected.
inline constexpr double kSingularGuard = 1e-9;

/// The sphere |x - center| = radius; radius 0 is an isolated point.
template <std::size_t N>
struct Singularity {
  Vec<N> center{};
  double radius = 0.0;

  double distance(const Vec<N>& x) const { return std::fabs(norm(x - center) - radius); }
};

struct DiffMode {
  enum class Kind { analytic, fd };
  Kind kind = Kind::analytic;
  double step = kDefaultFdStep;

  static constexpr DiffMode analytic() { return {Kind::analytic, kDefaultFdStep}; }
  static constexpr DiffMode fd(double h = kDefaultFdStep) { return {Kind::fd, h}; }
  constexpr bool is_fd() const { return kind == Kind::fd; }
};

template <std::size_t N>
struct FieldSpec {
  using Point = Vec<N>;
  std::string name;
  std::function<double(const Point&)> value;
  std::function<Point(const Point&)> gradient;
  std::function<Mat<N>(const Point&)> hessian;
  std::vector<Singularity<N>> singular;
  /// Open ball |x| < domain_radius on which the field is defined.
  double domain_radius = std::numeric_limits<double>::infinity();
};

/// Immutable scalar field. Copies share the evaluators.
template <std::size_t N>
class ScalarField {
 public:
  using Point = Vec<N>;
  static constexpr std::size_t dimension = N;

  explicit ScalarField(FieldSpec<N> spec)
      : spec_(std::make_shared<const FieldSpec<N>>(std::move(spec))) {
    if (!spec_->value) throw std::invalid_argument("ScalarField: value evaluator required");
  }

  const std::string& name() const { return spec_->name; }
  const std::vector<Singularity<N>>& singular_set() const { return spec_->singular; }
  double domain_radius() const { return spec_->domain_radius; }
  bool has_gradient() const { return static_cast<bool>(spec_->gradient); }
  bool has_hessian() const { return static_cast<bool>(spec_->hessian); }

  /// Distance from x to the nearest singularity or to the domain boundary.
  double clearance(const Point& x) const {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& s : spec_->singular) d = std::fmin(d, s.distance(x));
    if (std::isfinite(spec_->domain_radius)) d = std::fmin(d, spec_->domain_radius - norm(x));
    return d;
  }

  bool is_regular(const Point& x, double margin = kSingularGuard) const {
    for (std::size_t i = 0; i < N; ++i)
      if (!std::isfinite(x[i])) return false;
    return clearance(x) > margin;
  }

  void require_regular(const Point& x, double margin = kSingularGuard) const {
    if (!is_regular(x, margin))
      throw DomainError(name() + ": point within " + std::to_string(margin) +
                        " of the singular set or outside the domain");
  }

  double operator()(const Point& x) const {
    require_regular(x);
    return spec_->value(x);
  }

  Point analytic_gradient(const Point& x) const {
    if (!has_gradient()) throw ModeError(name() + ": no analytic gradient");
    require_regular(x);
    return spec_->gradient(x);
  }

  Mat<N> analytic_hessian(const Point& x) const {
    if (!has_hessian()) throw ModeError(name() + ": no analytic Hessian");
    require_regular(x);
    return spec_->hessian(x);
  }

  const FieldSpec<N>& spec() const { return *spec_; }

 private:
  std::shared_ptr<const FieldSpec<N>> spec_;
};

using ScalarField4 = ScalarField<4>;

// --- finite-difference primitives on plain callables -----------------------

/// Second-order central-difference gradient.
template <std::size_t N, class F>
Vec<N> fd_gradient2(const F& f, const Vec<N>& x, double h) {
  Vec<N> g;
  for (std::size_t i = 0; i < N; ++i) {
    Vec<N> p = x, m = x;
    p[i] += h;
    m[i] -= h;
    g[i] = (f(p) - f(m)) / (2.0 * h);
  }
  return g;
}

/// Fourth-order central-difference gradient (five-point stencil).
template <std::size_t N, class F>
Vec<N> fd_gradient4(const F& f, const Vec<N>& x, double h) {
  Vec<N> g;
  for (std::size_t i = 0; i < N; ++i) {
    Vec<N> p1 = x, m1 = x, p2 = x, m2 = x;
    p1[i] += h;
    m1[i] -= h;
    p2[i] += 2.0 * h;
    m2[i] -= 2.0 * h;
    g[i] = (8.0 * (f(p1) - f(m1)) - (f(p2) - f(m2))) / (12.0 * h);
  }
  return g;
}

/// Second-order central-difference Hessian.
template <std::size_t N, class F>
Mat<N> fd_hessian2(const F& f, const Vec<N>& x, double h) {
  Mat<N> H;
  const double f0 = f(x);
  for (std::size_t i = 0; i < N; ++i) {
    Vec<N> p = x, m = x;
    p[i] += h;
    m[i] -= h;
    H(i, i) = (f(p) - 2.0 * f0 + f(m)) / (h * h);
    for (std::size_t j = i + 1; j < N; ++j) {
      Vec<N> pp = x, pm = x, mp = x, mm = x;
      pp[i] += h, pp[j] += h;
      pm[i] += h, pm[j] -= h;
      mp[i] -= h, mp[j] += h;
      mm[i] -= h, mm[j] -= h;
      H(i, j) = H(j, i) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * h * h);
    }
  }
  return H;
}

/// Central-difference Jacobian (fourth order) of a map R^N -> R^M.
template <std::size_t M, std::size_t N, class F>
std::array<Vec<N>, M> fd_jacobian4(const F& map, const Vec<N>& x, double h) {
  std::array<Vec<N>, M> J{};
  for (std::size_t j = 0; j < N; ++j) {
    Vec<N> p1 = x, m1 = x, p2 = x, m2 = x;
    p1[j] += h;
    m1[j] -= h;
    p2[j] += 2.0 * h;
    m2[j] -= 2.0 * h;
    const Vec<M> a = map(p1), b = map(m1), c = map(p2), d = map(m2);
    for (std::size_t i = 0; i < M; ++i) J[i][j] = (8.0 * (a[i] - b[i]) - (c[i] - d[i])) / (12.0 * h);
  }
  return J;
}

// --- operators on fields ----------------------------------------------------

template <std::size_t N>
Vec<N> gradient(const ScalarField<N>& f, const Vec<N>& x, DiffMode mode = DiffMode::analytic()) {
  if (!mode.is_fd()) return f.analytic_gradient(x);
  f.require_regular(x, std::fmax(kSingularGuard, 1.5 * mode.step));
  return fd_gradient2<N>([&](const Vec<N>& y) { return f(y); }, x, mode.step);
}

template <std::size_t N>
Mat<N> hessian(const ScalarField<N>& f, const Vec<N>& x, DiffMode mode = DiffMode::analytic()) {
  if (!mode.is_fd()) return f.analytic_hessian(x);
  f.require_regular(x, std::fmax(kSingularGuard, 2.0 * mode.step));
  return fd_hessian2<N>([&](const Vec<N>& y) { return f(y); }, x, mode.step);
}

/// Flat Laplacian (trace of the Hessian).
template <std::size_t N>
double laplacian_flat(const ScalarField<N>& f, const Vec<N>& x, DiffMode mode = DiffMode::analytic()) {
  if (!mode.is_fd()) return trace(f.analytic_hessian(x));
  f.require_regular(x, std::fmax(kSingularGuard, 1.5 * mode.step));
  const double h = mode.step;
  const double f0 = f(x);
  double s = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    Vec<N> p = x, m = x;
    p[i] += h;
    m[i] -= h;
    s += (f(p) - 2.0 * f0 + f(m)) / (h * h);
  }
  return s;
}

/// Value, gradient and Hessian in one go; analytic where available, otherwise
/// finite differences with `fallback_step`.
template <std::size_t N>
struct Jet {
  double value;
  Vec<N> grad;
  Mat<N> hess;
};

template <std::size_t N>
Jet<N> jet(const ScalarField<N>& f, const Vec<N>& x, double fallback_step) {
  Jet<N> j;
  j.value = f(x);
  j.grad = f.has_gradient() ? f.analytic_gradient(x) : gradient(f, x, DiffMode::fd(fallback_step));
  j.hess = f.has_hessian() ? f.analytic_hessian(x) : hessian(f, x, DiffMode::fd(fallback_step));
  return j;
}

struct FdDiscrepancy {
  double gradient = 0.0;
  double laplacian = 0.0;
  double max() const { return std::fmax(gradient, laplacian); }
};

/// max |analytic - fd(h)| for the gradient (componentwise) and the Laplacian.
template <std::size_t N>
FdDiscrepancy fd_consistency(const ScalarField<N>& f, const Vec<N>& x, double h) {
  if (!f.has_gradient() || !f.has_hessian())
    throw ModeError(f.name() + ": fd_consistency needs analytic derivatives");
  FdDiscrepancy d;
  d.gradient = max_abs(gradient(f, x) - gradient(f, x, DiffMode::fd(h)));
  d.laplacian = std::fabs(laplacian_flat(f, x) - laplacian_flat(f, x, DiffMode::fd(h)));
  return d;
}

// --- field combinators and elementary fields --------------------------------

template <std::size_t N>
ScalarField<N> constant_field(double c) {
  FieldSpec<N> s;
  s.name = "constant(" + std::to_string(c) + ")";
  s.value = [c](const Vec<N>&) { return c; };
  s.gradient = [](const Vec<N>&) { return Vec<N>{}; };
  s.hessian = [](const Vec<N>&) { return Mat<N>{}; };
  return ScalarField<N>(std::move(s));
}

/// scale * |x - center|^alpha. Singular at the center unless alpha is an even
/// non-negative integer.
template <std::size_t N>
ScalarField<N> radial_power(double alpha, Vec<N> center = {}, double scale = 1.0) {
  FieldSpec<N> s;
  s.name = "radial_power(" + std::to_string(alpha) + ")";
  s.value = [=](const Vec<N>& x) { return scale * std::pow(norm(x - center), alpha); };
  s.gradient = [=](const Vec<N>& x) {
    const Vec<N> d = x - center;
    const double r2 = norm2(d);
    return (scale * alpha * std::pow(r2, 0.5 * alpha - 1.0)) * d;
  };
  s.hessian = [=](const Vec<N>& x) {
    const Vec<N> d = x - center;
    const double r2 = norm2(d);
    const double c = scale * alpha * std::pow(r2, 0.5 * alpha - 1.0);
    return c * (Mat<N>::identity() + ((alpha - 2.0) / r2) * outer(d, d));
  };
  const bool smooth = alpha >= 0.0 && std::fmod(alpha, 2.0) == 0.0;
  if (!smooth) s.singular.push_back({center, 0.0});
  return ScalarField<N>(std::move(s));
}

/// Pointwise product with the product rule for derivatives.
template <std::size_t N>
ScalarField<N> product(const ScalarField<N>& f, const ScalarField<N>& g, std::string name = {}) {
  FieldSpec<N> s;
  s.name = name.empty() ? f.name() + "*" + g.name() : std::move(name);
  s.value = [f, g](const Vec<N>& x) { return f.spec().value(x) * g.spec().value(x); };
  if (f.has_gradient() && g.has_gradient()) {
    s.gradient = [f, g](const Vec<N>& x) {
      return f.spec().value(x) * g.spec().gradient(x) + g.spec().value(x) * f.spec().gradient(x);
    };
  }
  if (f.has_gradient() && g.has_gradient() && f.has_hessian() && g.has_hessian()) {
    s.hessian = [f, g](const Vec<N>& x) {
      const Vec<N> gf = f.spec().gradient(x), gg = g.spec().gradient(x);
      return f.spec().value(x) * g.spec().hessian(x) + g.spec().value(x) * f.spec().hessian(x) +
             outer(gf, gg) + outer(gg, gf);
    };
  }
  s.singular = f.singular_set();
  s.singular.insert(s.singular.end(), g.singular_set().begin(), g.singular_set().end());
  s.domain_radius = std::fmin(f.domain_radius(), g.domain_radius());
  return ScalarField<N>(std::move(s));
}

/// exp(x_1); used as a field that solves no equation of the reduced type.
template <std::size_t N>
ScalarField<N> exp_first_coordinate() {
  FieldSpec<N> s;
  s.name = "exp(x1)";
  s.value = [](const Vec<N>& x) { return std::exp(x[0]); };
  s.gradient = [](const Vec<N>& x) { return std::exp(x[0]) * Vec<N>::unit(0); };
  s.hessian = [](const Vec<N>& x) {
    Mat<N> H;
    H(0, 0) = std::exp(x[0]);
    return H;
  };
  return ScalarField<N>(std::move(s));
}

// --- metrics and Einstein data ---------------------------------------------

/// Domain metric g = mu^2 dx^2 on (a chart of) a four-manifold.
class ConformalMetric {
 public:
  enum class Kind { flat, spherical, conformal };

  static ConformalMetric flat() { return ConformalMetric(Kind::flat, std::nullopt); }
  /// Stereographic chart of the unit S^4: mu = 2 / (1 + |x|^2).
  static ConformalMetric spherical() { return ConformalMetric(Kind::spherical, std::nullopt); }
  static ConformalMetric conformal(ScalarField4 mu) { return ConformalMetric(Kind::conformal, std::move(mu)); }

  Kind kind() const { return kind_; }
  bool is_flat() const { return kind_ == Kind::flat; }

  double factor(const Point4& x) const;
  /// grad ln mu (flat gradient).
  Vec4 grad_log_factor(const Point4& x) const;

 private:
  ConformalMetric(Kind k, std::optional<ScalarField4> mu) : kind_(k), mu_(std::move(mu)) {}
  Kind kind_;
  std::optional<ScalarField4> mu_;
};

/// Laplace-Beltrami of f for g = mu^2 dx^2 in dimension four:
///   Delta_g f = mu^-2 (Delta f + 2 <grad ln mu, grad f>).
double laplace_beltrami(const ScalarField4& f, const ConformalMetric& g, const Point4& x,
                        DiffMode mode = DiffMode::analytic());

/// Ricci = a g on an n-manifold.
struct EinsteinDatum {
  int n = 4;
  double a = 0.0;

  EinsteinDatum(int dimension, double einstein_constant) : n(dimension), a(einstein_constant) {
    if (n < 3) throw std::invalid_argument("EinsteinDatum: dimension must be >= 3");
  }
  double scalar_curvature() const { return n * a; }
};

}  // namespace bhc
