#include "bhc/fields.hpp"

namespace bhc {

double ConformalMetric::factor(const Point4& x) const {
  switch (kind_) {
    case Kind::flat:
      return 1.0;
    case Kind::spherical:
      return 2.0 / (1.0 + norm2(x));
    case Kind::conformal:
      break;
  }
  const double mu = (*mu_)(x);
  if (!(mu > 0.0)) throw DomainError("conformal metric factor must be positive");
  return mu;
}

Vec4 ConformalMetric::grad_log_factor(const Point4& x) const {
  switch (kind_) {
    case Kind::flat:
      return {};
    case Kind::spherical:
      return (-2.0 / (1.0 + norm2(x))) * x;
    case Kind::conformal:
      break;
  }
  const auto mode = mu_->has_gradient() ? DiffMode::analytic() : DiffMode::fd();
  return gradient(*mu_, x, mode) / factor(x);
}

double laplace_beltrami(const ScalarField4& f, const ConformalMetric& g, const Point4& x, DiffMode mode) {
  const double flat = laplacian_flat(f, x, mode);
  if (g.is_flat()) return flat;
  const double mu = g.factor(x);
  return (flat + 2.0 * dot(g.grad_log_factor(x), gradient(f, x, mode))) / (mu * mu);
}

}  // namespace bhc
