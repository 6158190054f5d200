#pragma once

// Closed-form conformal factors: extremal bubbles, the classical examples,
// the cylinder map, and the Moebius transformations of R^4 u {inf} with
// their conformal factors for the four flat/spherical metric pairings.

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bhc/fields.hpp"
#include "bhc/residuals.hpp"

namespace bhc {

// --- bubbles ---------------------------------------------------------------

/// v(x) = (2 delta / (delta^2 + |x - x0|^2))^((n-2)/2) on R^n.
class Bubble {
 public:
  Bubble(int n, double delta, std::vector<double> center);

  int dimension() const { return n_; }
  double delta() const { return delta_; }
  std::span<const double> center() const { return center_; }

  double value(std::span<const double> x) const;
  std::vector<double> gradient(std::span<const double> x) const;
  double laplacian(std::span<const double> x) const;

  /// Peak value (2/delta)^((n-2)/2), attained at the center.
  double peak() const;
  /// n(n-2)/4 and (n+2)/(n-2): Delta v = -coefficient * v^exponent.
  double el_coefficient() const { return n_ * (n_ - 2) / 4.0; }
  double el_exponent() const { return (n_ + 2.0) / (n_ - 2.0); }

 private:
  int n_;
  double delta_;
  std::vector<double> center_;
};

/// The bubble as an analytic field on R^N.
template <std::size_t N>
ScalarField<N> bubble_field(double delta, Vec<N> center = {}) {
  if (!(delta > 0.0)) throw std::invalid_argument("bubble_field: delta must be positive");
  const double p = (static_cast<double>(N) - 2.0) / 2.0;
  FieldSpec<N> s;
  s.name = "bubble(delta=" + std::to_string(delta) + ")";
  // w = 2 delta / q, q = delta^2 + |x - x0|^2, v = w^p
  s.value = [=](const Vec<N>& x) { return std::pow(2.0 * delta / (delta * delta + norm2(x - center)), p); };
  s.gradient = [=](const Vec<N>& x) {
    const Vec<N> d = x - center;
    const double q = delta * delta + norm2(d);
    const double w = 2.0 * delta / q;
    return (p * std::pow(w, p - 1.0) * (-4.0 * delta / (q * q))) * d;
  };
  s.hessian = [=](const Vec<N>& x) {
    const Vec<N> d = x - center;
    const double q = delta * delta + norm2(d);
    const double w = 2.0 * delta / q;
    const Vec<N> gw = (-4.0 * delta / (q * q)) * d;
    const Mat<N> hw = (-4.0 * delta / (q * q)) * Mat<N>::identity() + (16.0 * delta / (q * q * q)) * outer(d, d);
    return (p * std::pow(w, p - 1.0)) * hw + (p * (p - 1.0) * std::pow(w, p - 2.0)) * outer(gw, gw);
  };
  return ScalarField<N>(std::move(s));
}

// --- Sobolev quotient -------------------------------------------------------

struct RadialQuadrature {
  double r_max = 200.0;
  std::size_t intervals = 40000;
};

struct SobolevResult {
  double quotient = 0.0;
  double gradient_integral = 0.0;  // int |grad v|^2
  double lp_integral = 0.0;        // int |v|^p
  /// Largest estimated tail/integral ratio of the two integrals.
  double tail_fraction = 0.0;
  bool accuracy_warning = false;
};

/// (int |grad v|^2) / (int |v|^p)^(2/p), p = 2n/(n-2), for a radial profile
/// v(r) about some center. Composite Simpson on [0, r_max] plus a power-law
/// tail estimate; a tail above 1% of either integral raises the warning.
SobolevResult sobolev_quotient_radial(int n, const std::function<double(double)>& v,
                                      const std::function<double(double)>& dv, const RadialQuadrature& q = {});

/// The same quotient for a non-radial field on R^4, by a tensor-product
/// Gauss-Legendre rule in the mapped coordinates x_i = scale * tan(pi t_i / 2).
SobolevResult sobolev_quotient_tensor(const ScalarField4& v, std::size_t points_per_axis = 32, double scale = 1.5);

/// n(n-2)/4 * w^(2/n), with w the volume of the unit n-sphere S^n.
double best_sobolev_constant(int n);

// --- classical examples -----------------------------------------------------

enum class ClassicalName { inverse_radius, poincare_ball, sphere_identity, power_alpha, harmonic_inversion };

std::optional<ClassicalName> parse_classical(std::string_view s);
std::string_view to_string(ClassicalName n);

struct ClassicalExample {
  std::string name;
  ScalarField4 field;
  double a = 0.0;
  std::optional<double> A;
  std::optional<double> R_h;
  ConformalMetric domain = ConformalMetric::flat();
};

/// `alpha` is used by power_alpha only.
ClassicalExample classical_example(ClassicalName name, double alpha = -1.0);

/// 1 + 0.1 x1^2 / (1 + |x|^2): multiplier that destroys every closed-form solution.
ScalarField4 perturbation_multiplier();

// --- cylinder map ------------------------------------------------------------

struct CylinderImage {
  double t = 0.0;  // ln |x|
  Vec4 theta;      // x / |x| on S^3
  double lambda = 0.0;
};

/// phi(r theta) = (ln r, theta) into R x S^3 with conformal factor 1/|x|.
CylinderImage cylinder_check(const Point4& x);

/// Pullback of dt^2 + g_{S^3} (S^3 with its induced metric in R^4) by the
/// cylinder map, from a finite-difference Jacobian.
Mat4 cylinder_pullback_metric(const Point4& x, double h = 1e-4);

// --- Moebius transformations -------------------------------------------------

/// x -> t_out + alpha Q (x - t_in) / |x - t_in|^eps, Q orthogonal, eps in {0, 2}.
struct MobiusTransform {
  Vec4 t_out{};
  Vec4 t_in{};
  double alpha = 1.0;
  Mat4 Q = Mat4::identity();
  int eps = 0;

  /// Validating constructor.
  static MobiusTransform make(Vec4 t_out, Vec4 t_in, double alpha, Mat4 Q, int eps);
  static MobiusTransform identity() { return make({}, {}, 1.0, Mat4::identity(), 0); }
  static MobiusTransform inversion() { return make({}, {}, 1.0, Mat4::identity(), 2); }

  /// Literal form: `eps=2 alpha=1.5 tout=0,0,0,0 tin=1,0,0,0 Q=identity`.
  /// Q is `identity` or sixteen row-major entries.
  static MobiusTransform parse(std::string_view literal);
  std::string to_literal() const;
};

enum class MetricKind { flat, spherical };

struct MetricPairing {
  MetricKind domain = MetricKind::flat;
  MetricKind codomain = MetricKind::flat;

  static constexpr MetricPairing flat_flat() { return {MetricKind::flat, MetricKind::flat}; }
  static constexpr MetricPairing flat_sphere() { return {MetricKind::flat, MetricKind::spherical}; }
  static constexpr MetricPairing sphere_flat() { return {MetricKind::spherical, MetricKind::flat}; }
  static constexpr MetricPairing sphere_sphere() { return {MetricKind::spherical, MetricKind::spherical}; }
  friend constexpr bool operator==(MetricPairing, MetricPairing) = default;
};

std::string to_string(MetricPairing p);
/// flat-flat | flat-sphere | sphere-flat | sphere-sphere
std::optional<MetricPairing> parse_pairing(std::string_view s);
inline constexpr MetricPairing kAllPairings[4] = {MetricPairing::flat_flat(), MetricPairing::flat_sphere(),
                                                  MetricPairing::sphere_flat(), MetricPairing::sphere_sphere()};

Point4 mobius_apply(const MobiusTransform& T, const Point4& x);

/// Conformal factor of T for the pairing, as an analytic field. Singular at
/// t_in when eps = 2. Requires alpha > 0.
ScalarField4 mobius_conformal_factor(const MobiusTransform& T, MetricPairing P);

/// Flat-to-sphere factor from the expanded closed form
/// 2a / ((1+|t|^2)|x-b|^e + 2a<t, Q(x-b)> + a^2 |x-b|^(2-e)).
double flat_sphere_factor_expanded(const MobiusTransform& T, const Point4& x);

/// lambda(x) = 2 delta / (delta^2 + |x - e|^2).
struct NormalForm {
  double delta = 0.0;
  Vec4 e{};

  double operator()(const Point4& x) const { return 2.0 * delta / (delta * delta + norm2(x - e)); }
};

NormalForm mobius_normal_form(const MobiusTransform& T, MetricPairing P = MetricPairing::flat_sphere());

enum class Classification { harmonic, proper_biharmonic, not_biharmonic };
std::string_view to_string(Classification c);

struct Verdict {
  Classification classification = Classification::not_biharmonic;
  /// Classification read off the numerical evidence alone.
  Classification numerical = Classification::not_biharmonic;
  double bfo_sup = 0.0;
  double tension_max = 0.0;
  double factor_range = 0.0;
  std::optional<ConstantA> fit;
  std::optional<NormalForm> normal_form;
  std::string reason;

  bool corroborated() const { return classification == numerical; }
};

struct AuditOptions {
  std::size_t points = 200;
  std::uint64_t seed = 0;
  double flat_radius = 5.0;
  double sphere_radius = 3.0;
  double exclusion = 0.05;
  double biharmonic_tol = 1e-5;
  double harmonic_tol = 1e-8;
  double isometry_tol = 1e-10;
};

/// True when T is an isometry of the round S^4 in the stereographic chart.
bool is_sphere_isometry(const MobiusTransform& T, double tol = 1e-10);

Verdict classify_mobius(const MobiusTransform& T, MetricPairing P, const AuditOptions& opt = {});

/// Random orthogonal 4x4 matrix (Gram-Schmidt of a Gaussian matrix; includes reflections).
Mat4 random_orthogonal(std::mt19937_64& rng);
/// alpha in [0.5, 2], translations with coordinates in [-1, 1].
MobiusTransform random_mobius(std::mt19937_64& rng, int eps);
/// A random isometry of the round sphere with the given eps.
MobiusTransform random_sphere_isometry(std::mt19937_64& rng, int eps);

}  // namespace bhc
