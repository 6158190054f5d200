#include <cmath>
#include <numbers>

#include "bhc/families.hpp"

namespace bhc {

namespace {

double unit_sphere_area(int dim) {  // |S^dim|
  const double m = dim + 1.0;
  return 2.0 * std::pow(std::numbers::pi, m / 2.0) / std::tgamma(m / 2.0);
}

struct Integral {
  double value = 0.0;
  double tail = 0.0;
};

// Simpson on [0, R] plus a power-law tail fitted at R/2 and R.
template <class F>
Integral simpson_with_tail(const F& f, double R, std::size_t intervals) {
  if (intervals % 2) ++intervals;
  const double h = R / static_cast<double>(intervals);
  double s = f(0.0) + f(R);
  for (std::size_t i = 1; i < intervals; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * h);
  Integral out;
  out.value = s * h / 3.0;
  const double fR = f(R), fH = f(0.5 * R);
  if (fR > 0.0 && fH > 0.0) {
    const double q = std::log(fH / fR) / std::log(2.0);  // f ~ r^-q
    out.tail = q > 1.0 ? fR * R / (q - 1.0) : std::numeric_limits<double>::infinity();
  }
  return out;
}

// Nodes and weights on (-1, 1), Newton iteration on P_m from the Chebyshev guess.
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(std::size_t m) {
  std::vector<double> x(m), w(m);
  for (std::size_t i = 0; i < (m + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (std::size_t k = 2; k <= m; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = p2;
      }
      if (m == 1) p1 = z, p0 = 1.0;
      dp = m * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::fabs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[m - 1 - i] = z;
    w[i] = w[m - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return {x, w};
}

SobolevResult finish(int n, double grad, double lp, double tail_fraction) {
  SobolevResult r;
  const double p = 2.0 * n / (n - 2.0);
  r.gradient_integral = grad;
  r.lp_integral = lp;
  r.quotient = grad / std::pow(lp, 2.0 / p);
  r.tail_fraction = tail_fraction;
  r.accuracy_warning = !(tail_fraction <= 0.01);
  return r;
}

}  // namespace

SobolevResult sobolev_quotient_radial(int n, const std::function<double(double)>& v,
                                      const std::function<double(double)>& dv, const RadialQuadrature& q) {
  if (n < 3) throw std::invalid_argument("sobolev_quotient_radial: n must be >= 3");
  const double area = unit_sphere_area(n - 1);
  const double p = 2.0 * n / (n - 2.0);
  const auto g = [&](double r) {
    const double d = dv(r);
    return area * d * d * std::pow(r, n - 1);
  };
  const auto l = [&](double r) { return area * std::pow(std::fabs(v(r)), p) * std::pow(r, n - 1); };
  const Integral G = simpson_with_tail(g, q.r_max, q.intervals);
  const Integral L = simpson_with_tail(l, q.r_max, q.intervals);
  const double tail = std::fmax(G.tail / G.value, L.tail / L.value);
  return finish(n, G.value + (std::isfinite(G.tail) ? G.tail : 0.0), L.value + (std::isfinite(L.tail) ? L.tail : 0.0),
                tail);
}

SobolevResult sobolev_quotient_tensor(const ScalarField4& v, std::size_t m, double scale) {
  if (m < 4) throw std::invalid_argument("sobolev_quotient_tensor: too few points per axis");
  const auto [ts, gw] = gauss_legendre(m);
  std::vector<double> xs(m), ws(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double c = std::cos(0.5 * std::numbers::pi * ts[j]);
    xs[j] = scale * std::tan(0.5 * std::numbers::pi * ts[j]);
    ws[j] = gw[j] * scale * 0.5 * std::numbers::pi / (c * c);
  }
  const bool analytic = v.has_gradient();
  const bool unrestricted = v.singular_set().empty() && !std::isfinite(v.domain_radius());
  double grad = 0.0, lp = 0.0;
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b)
      for (std::size_t c = 0; c < m; ++c)
        for (std::size_t d = 0; d < m; ++d) {
          const Point4 x{xs[a], xs[b], xs[c], xs[d]};
          if (!unrestricted && !v.is_regular(x, 1e-6)) continue;
          const double w = ws[a] * ws[b] * ws[c] * ws[d];
          const double f = v.spec().value(x);
          const Vec4 df = analytic ? v.spec().gradient(x) : gradient(v, x, DiffMode::fd());
          grad += w * norm2(df);
          lp += w * f * f * f * f;
        }
  return finish(4, grad, lp, 0.0);
}

double best_sobolev_constant(int n) {
  if (n < 3) throw std::invalid_argument("best_sobolev_constant: n must be >= 3");
  return n * (n - 2) / 4.0 * std::pow(unit_sphere_area(n), 2.0 / n);
}

}  // namespace bhc
