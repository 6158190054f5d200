#include <algorithm>
#include <charconv>
#include <sstream>

#include "bhc/families.hpp"

namespace bhc {

namespace {

constexpr double kOrthogonalityTol = 1e-12;

std::string format_double(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double parse_double(std::string_view s, std::string_view what) {
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size() || !std::isfinite(v))
    throw std::invalid_argument("transform literal: bad number '" + std::string(s) + "' for " + std::string(what));
  return v;
}

std::vector<double> parse_list(std::string_view s, std::string_view what) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = s.find(',', start);
    out.push_back(parse_double(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start), what));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

Vec4 to_vec4(const std::vector<double>& v, std::string_view what) {
  if (v.size() != 4) throw std::invalid_argument("transform literal: " + std::string(what) + " needs 4 entries");
  return {v[0], v[1], v[2], v[3]};
}

std::string join(const Vec4& v) {
  std::string s;
  for (std::size_t i = 0; i < 4; ++i) s += (i ? "," : "") + format_double(v[i]);
  return s;
}

// 2 delta / (delta^2 + |x - e|^2) with analytic derivatives.
ScalarField4 normal_form_field(const NormalForm& nf, std::string name) {
  FieldSpec<4> s = bubble_field<4>(nf.delta, nf.e).spec();
  s.name = std::move(name);
  return ScalarField4(std::move(s));
}

// (1 + |x|^2) / 2 = 1 / mu for the stereographic chart.
ScalarField4 inverse_sphere_factor() {
  FieldSpec<4> s;
  s.name = "(1+|x|^2)/2";
  s.value = [](const Vec4& x) { return 0.5 * (1.0 + norm2(x)); };
  s.gradient = [](const Vec4& x) { return x; };
  s.hessian = [](const Vec4&) { return Mat4::identity(); };
  return ScalarField4(std::move(s));
}

ScalarField4 flat_flat_factor(const MobiusTransform& T) {
  if (T.eps == 0) return constant_field<4>(T.alpha);
  return radial_power<4>(-2.0, T.t_in, T.alpha);
}

ScalarField4 with_singularity(const ScalarField4& f, const MobiusTransform& T, std::string name) {
  FieldSpec<4> s = f.spec();
  s.name = std::move(name);
  if (T.eps == 2 && s.singular.empty()) s.singular.push_back({T.t_in, 0.0});
  return ScalarField4(std::move(s));
}

}  // namespace

MobiusTransform MobiusTransform::make(Vec4 t_out, Vec4 t_in, double alpha, Mat4 Q, int eps) {
  if (eps != 0 && eps != 2) throw std::invalid_argument("MobiusTransform: eps must be 0 or 2");
  if (!(alpha != 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("MobiusTransform: alpha must be nonzero");
  for (std::size_t i = 0; i < 4; ++i) {
    if (!std::isfinite(t_out[i]) || !std::isfinite(t_in[i]))
      throw std::invalid_argument("MobiusTransform: translations must be finite");
  }
  if (max_abs(transpose(Q) * Q - Mat4::identity()) > kOrthogonalityTol)
    throw std::invalid_argument("MobiusTransform: Q is not orthogonal");
  return {t_out, t_in, alpha, Q, eps};
}

MobiusTransform MobiusTransform::parse(std::string_view literal) {
  Vec4 t_out{}, t_in{};
  double alpha = 1.0;
  Mat4 Q = Mat4::identity();
  int eps = 0;
  std::istringstream in{std::string(literal)};
  std::string tok;
  bool any = false;
  while (in >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos || eq == 0) throw std::invalid_argument("transform literal: expected key=value, got '" + tok + "'");
    const std::string key = tok.substr(0, eq);
    const std::string_view val = std::string_view(tok).substr(eq + 1);
    if (key == "eps") {
      const double e = parse_double(val, key);
      if (e != 0.0 && e != 2.0) throw std::invalid_argument("transform literal: eps must be 0 or 2");
      eps = static_cast<int>(e);
    } else if (key == "alpha") {
      alpha = parse_double(val, key);
    } else if (key == "tout") {
      t_out = to_vec4(parse_list(val, key), key);
    } else if (key == "tin") {
      t_in = to_vec4(parse_list(val, key), key);
    } else if (key == "Q") {
      if (val != "identity") {
        const auto q = parse_list(val, key);
        if (q.size() != 16) throw std::invalid_argument("transform literal: Q needs 16 entries or 'identity'");
        for (std::size_t i = 0; i < 16; ++i) Q(i / 4, i % 4) = q[i];
      }
    } else {
      throw std::invalid_argument("transform literal: unknown key '" + key + "'");
    }
    any = true;
  }
  if (!any) throw std::invalid_argument("transform literal: empty");
  return make(t_out, t_in, alpha, Q, eps);
}

std::string MobiusTransform::to_literal() const {
  std::string s = "eps=" + std::to_string(eps) + " alpha=" + format_double(alpha) + " tout=" + join(t_out) +
                  " tin=" + join(t_in) + " Q=";
  if (Q == Mat4::identity()) return s + "identity";
  for (std::size_t i = 0; i < 16; ++i) s += (i ? "," : "") + format_double(Q(i / 4, i % 4));
  return s;
}

std::string to_string(MetricPairing p) {
  const auto k = [](MetricKind m) { return m == MetricKind::flat ? std::string("flat") : std::string("sphere"); };
  return k(p.domain) + "-" + k(p.codomain);
}

std::optional<MetricPairing> parse_pairing(std::string_view s) {
  for (const auto& p : kAllPairings)
    if (to_string(p) == s) return p;
  return std::nullopt;
}

Point4 mobius_apply(const MobiusTransform& T, const Point4& x) {
  const Vec4 d = x - T.t_in;
  if (T.eps == 0) return T.t_out + T.alpha * (T.Q * d);
  const double r2 = norm2(d);
  if (!(std::sqrt(r2) > kSingularGuard)) throw DomainError("mobius_apply: evaluation at the pole");
  return T.t_out + (T.alpha / r2) * (T.Q * d);
}

NormalForm mobius_normal_form(const MobiusTransform& T, MetricPairing P) {
  if (P != MetricPairing::flat_sphere())
    throw UnsupportedError("mobius_normal_form: defined for the flat-sphere pairing only");
  const Vec4 qa = transpose(T.Q) * T.t_out;
  if (T.eps == 2) {
    const double s = 1.0 + norm2(T.t_out);
    return {T.alpha / s, T.t_in - (T.alpha / s) * qa};
  }
  return {1.0 / T.alpha, T.t_in - qa / T.alpha};
}

double flat_sphere_factor_expanded(const MobiusTransform& T, const Point4& x) {
  const Vec4 d = x - T.t_in;
  const double r2 = norm2(d);
  if (T.eps == 2 && !(std::sqrt(r2) > kSingularGuard))
    throw DomainError("flat_sphere_factor_expanded: evaluation at the pole");
  const double re = T.eps == 2 ? r2 : 1.0;       // |x-b|^eps
  const double r2e = T.eps == 2 ? 1.0 : r2;      // |x-b|^(2-eps)
  const double a = T.alpha;
  return 2.0 * a / ((1.0 + norm2(T.t_out)) * re + 2.0 * a * dot(T.t_out, T.Q * d) + a * a * r2e);
}

ScalarField4 mobius_conformal_factor(const MobiusTransform& T, MetricPairing P) {
  if (!(T.alpha > 0.0)) throw UnsupportedError("mobius_conformal_factor: alpha must be positive");
  const std::string name = "mobius[" + to_string(P) + "](" + T.to_literal() + ")";
  const bool flat_dom = P.domain == MetricKind::flat;
  const bool flat_cod = P.codomain == MetricKind::flat;
  if (flat_cod) {
    const ScalarField4 ff = flat_flat_factor(T);
    if (flat_dom) return with_singularity(ff, T, name);
    return with_singularity(product(inverse_sphere_factor(), ff), T, name);
  }
  // The flat-sphere factor nu(T(x)) alpha/|x-b|^eps is the normal-form bubble.
  const ScalarField4 fs = normal_form_field(mobius_normal_form(T), name);
  if (flat_dom) return with_singularity(fs, T, name);
  return with_singularity(product(inverse_sphere_factor(), fs), T, name);
}

std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::harmonic:
      return "harmonic";
    case Classification::proper_biharmonic:
      return "proper_biharmonic";
    case Classification::not_biharmonic:
      return "not_biharmonic";
  }
  return "unknown";
}

bool is_sphere_isometry(const MobiusTransform& T, double tol) {
  if (norm(T.t_in - transpose(T.Q) * T.t_out) > tol) return false;
  const double target = T.eps == 0 ? 1.0 : 1.0 + norm2(T.t_out);
  return std::fabs(T.alpha - target) <= tol * target;
}

Verdict classify_mobius(const MobiusTransform& T, MetricPairing P, const AuditOptions& opt) {
  Verdict v;
  const bool flat_dom = P.domain == MetricKind::flat;
  const bool flat_cod = P.codomain == MetricKind::flat;
  if (flat_dom && flat_cod) {
    v.classification = T.eps == 0 ? Classification::harmonic : Classification::proper_biharmonic;
    v.reason = T.eps == 0 ? "homothety: constant factor alpha" : "factor alpha/|x-b|^2 is harmonic and nonconstant";
  } else if (flat_dom) {
    v.classification = Classification::proper_biharmonic;
    v.reason = "factor is a bubble 2d/(d^2+|x-e|^2), never constant";
    v.normal_form = mobius_normal_form(T);
  } else if (flat_cod) {
    v.classification = Classification::not_biharmonic;
    v.reason = "no Moebius map from the sphere into flat space is biharmonic";
  } else if (is_sphere_isometry(T, opt.isometry_tol)) {
    v.classification = Classification::harmonic;
    v.reason = "isometry of the round sphere: factor identically 1";
  } else {
    v.classification = Classification::not_biharmonic;
    v.reason = "sphere-sphere factor is nonconstant off the isometry locus";
  }

  const ScalarField4 lambda = mobius_conformal_factor(T, P);
  const ConformalMetric g = flat_dom ? ConformalMetric::flat() : ConformalMetric::spherical();
  const EinsteinDatum datum(4, flat_dom ? 0.0 : 3.0);
  GridSpec spec;
  spec.count = opt.points;
  spec.radius = flat_dom ? opt.flat_radius : opt.sphere_radius;
  spec.exclusion = opt.exclusion;
  spec.seed = opt.seed;
  const auto pts = verification_grid(lambda, spec);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  std::vector<Point4> used;
  for (const auto& x : pts) {
    try {
      const double bfo = bfo_residual_norm(lambda, datum, x, g);
      const double tn = tension_norm(lambda, x, g);
      const double l = lambda(x);
      v.bfo_sup = std::fmax(v.bfo_sup, bfo);
      v.tension_max = std::fmax(v.tension_max, tn);
      lo = std::fmin(lo, l);
      hi = std::fmax(hi, l);
      used.push_back(x);
    } catch (const DomainError&) {
    }
  }
  v.factor_range = used.empty() ? 0.0 : hi - lo;
  if (used.size() >= 2) {
    try {
      v.fit = estimate_A(lambda, datum.a, used, g);
    } catch (const IllConditionedError&) {
    }
  }
  if (v.bfo_sup >= opt.biharmonic_tol)
    v.numerical = Classification::not_biharmonic;
  else if (v.tension_max < opt.harmonic_tol || v.factor_range < opt.harmonic_tol)
    v.numerical = Classification::harmonic;
  else
    v.numerical = Classification::proper_biharmonic;
  return v;
}

Mat4 random_orthogonal(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Mat4 Q;
  for (std::size_t i = 0; i < 4; ++i) {
    Vec4 v;
    for (std::size_t j = 0; j < 4; ++j) v[j] = gauss(rng);
    // Two Gram-Schmidt passes keep Q^T Q = I to roundoff.
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t k = 0; k < i; ++k) {
        const Vec4 q = Q.rows[k];
        v -= dot(v, q) * q;
      }
    v = v / norm(v);
    Q.rows[i] = v;
  }
  return Q;
}

MobiusTransform random_mobius(std::mt19937_64& rng, int eps) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0), scale(0.5, 2.0);
  Vec4 a, b;
  for (std::size_t i = 0; i < 4; ++i) a[i] = unit(rng);
  for (std::size_t i = 0; i < 4; ++i) b[i] = unit(rng);
  const double alpha = scale(rng);
  return MobiusTransform::make(a, b, alpha, random_orthogonal(rng), eps);
}

MobiusTransform random_sphere_isometry(std::mt19937_64& rng, int eps) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Vec4 a;
  for (std::size_t i = 0; i < 4; ++i) a[i] = unit(rng);
  const Mat4 Q = random_orthogonal(rng);
  const double alpha = eps == 0 ? 1.0 : 1.0 + norm2(a);
  return MobiusTransform::make(a, transpose(Q) * a, alpha, Q, eps);
}

}  // namespace bhc
