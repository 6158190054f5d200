#include <array>
#include <cmath>
#include <string>

#include "bhc/families.hpp"

namespace bhc {

namespace {

constexpr std::array<std::pair<ClassicalName, std::string_view>, 5> kNames{{
    {ClassicalName::inverse_radius, "inverse_radius"},
    {ClassicalName::poincare_ball, "poincare_ball"},
    {ClassicalName::sphere_identity, "sphere_identity"},
    {ClassicalName::power_alpha, "power_alpha"},
    {ClassicalName::harmonic_inversion, "harmonic_inversion"},
}};

// 2 / (1 + eps |x|^2); for eps = -1 the field lives on the unit ball.
ScalarField4 identity_map_factor(double eps, std::string name) {
  FieldSpec<4> s;
  s.name = std::move(name);
  s.value = [eps](const Vec4& x) { return 2.0 / (1.0 + eps * norm2(x)); };
  s.gradient = [eps](const Vec4& x) {
    const double q = 1.0 + eps * norm2(x);
    return (-4.0 * eps / (q * q)) * x;
  };
  s.hessian = [eps](const Vec4& x) {
    const double q = 1.0 + eps * norm2(x);
    return (-4.0 * eps / (q * q)) * Mat4::identity() + (16.0 * eps * eps / (q * q * q)) * outer(x, x);
  };
  if (eps < 0.0) {
    const double r = 1.0 / std::sqrt(-eps);
    s.singular.push_back({{}, r});
    s.domain_radius = r;
  }
  return ScalarField4(std::move(s));
}

ScalarField4 renamed(const ScalarField4& f, std::string name) {
  FieldSpec<4> s = f.spec();
  s.name = std::move(name);
  return ScalarField4(std::move(s));
}

}  // namespace

std::optional<ClassicalName> parse_classical(std::string_view s) {
  for (const auto& [n, name] : kNames)
    if (name == s) return n;
  return std::nullopt;
}

std::string_view to_string(ClassicalName n) {
  for (const auto& [c, name] : kNames)
    if (c == n) return name;
  return "unknown";
}

ClassicalExample classical_example(ClassicalName name, double alpha) {
  ClassicalExample ex{std::string(to_string(name)), constant_field<4>(1.0), 0.0, std::nullopt, std::nullopt,
                      ConformalMetric::flat()};
  switch (name) {
    case ClassicalName::inverse_radius:
      ex.field = renamed(radial_power<4>(-1.0), ex.name);
      ex.A = -1.0;
      break;
    case ClassicalName::poincare_ball:
      ex.field = identity_map_factor(-1.0, ex.name);
      ex.A = 2.0;
      break;
    case ClassicalName::sphere_identity:
      ex.field = identity_map_factor(1.0, ex.name);
      ex.A = -2.0;
      break;
    case ClassicalName::power_alpha:
      ex.field = radial_power<4>(alpha);
      // Delta |x|^alpha = alpha(alpha+2)|x|^(alpha-2) is a multiple of the
      // cube only for alpha = -1.
      if (alpha == -1.0) ex.A = -1.0;
      break;
    case ClassicalName::harmonic_inversion:
      ex.field = renamed(radial_power<4>(-2.0), ex.name);
      ex.A = 0.0;
      break;
  }
  if (ex.A) ex.R_h = codomain_scalar_curvature(*ex.A, ex.a, 1.0);
  return ex;
}

ScalarField4 perturbation_multiplier() {
  FieldSpec<4> s;
  s.name = "perturbation";
  // m = 1 + 0.1 x1^2 / q, q = 1 + |x|^2
  s.value = [](const Vec4& x) { return 1.0 + 0.1 * x[0] * x[0] / (1.0 + norm2(x)); };
  s.gradient = [](const Vec4& x) {
    const double q = 1.0 + norm2(x);
    const Vec4 g = (-0.2 * x[0] * x[0] / (q * q)) * x;
    return g + (0.2 * x[0] / q) * Vec4::unit(0);
  };
  s.hessian = [](const Vec4& x) {
    const double q = 1.0 + norm2(x);
    const double x1 = x[0];
    const Vec4 e1 = Vec4::unit(0);
    Mat4 H = (-0.2 * x1 * x1 / (q * q)) * Mat4::identity() + (0.8 * x1 * x1 / (q * q * q)) * outer(x, x);
    H = H + (-0.4 * x1 / (q * q)) * (outer(e1, x) + outer(x, e1));
    H(0, 0) += 0.2 / q;
    return H;
  };
  return ScalarField4(std::move(s));
}

CylinderImage cylinder_check(const Point4& x) {
  const double r = norm(x);
  if (!(r > kSingularGuard)) throw DomainError("cylinder_check: the origin has no image");
  return {std::log(r), x / r, 1.0 / r};
}

Mat4 cylinder_pullback_metric(const Point4& x, double h) {
  if (!(norm(x) > 2.0 * h)) throw DomainError("cylinder_pullback_metric: stencil reaches the origin");
  // (t, theta) in R x R^4, the S^3 factor carrying the induced metric.
  const auto phi = [](const Point4& y) {
    const double r = norm(y);
    return Vec<5>{std::log(r), y[0] / r, y[1] / r, y[2] / r, y[3] / r};
  };
  const auto J = fd_jacobian4<5, 4>(phi, x, h);
  Mat4 G;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      for (std::size_t k = 0; k < 5; ++k) G(i, j) += J[k][i] * J[k][j];
  return G;
}

}  // namespace bhc
