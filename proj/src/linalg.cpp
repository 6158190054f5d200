#include "bhc/linalg.hpp"

#include <cmath>

#include "bhc/errors.hpp"

namespace bhc {

TridiagonalLU::TridiagonalLU(const Tridiagonal& J)
    : dl_(J.sub), d_(J.diag), du_(J.sup), du2_(J.size() > 2 ? J.size() - 2 : 0, 0.0), swapped_(J.size(), 0) {
  const std::size_t n = d_.size();
  if (n == 0 || dl_.size() + 1 != n || du_.size() + 1 != n)
    throw std::invalid_argument("TridiagonalLU: inconsistent band sizes");
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::fabs(d_[i]) >= std::fabs(dl_[i])) {
      if (d_[i] != 0.0) {
        const double f = dl_[i] / d_[i];
        dl_[i] = f;
        d_[i + 1] -= f * du_[i];
      }
    } else {
      // Rows i and i+1 swap; fill enters the second superdiagonal.
      const double f = d_[i] / dl_[i];
      d_[i] = dl_[i];
      dl_[i] = f;
      const double t = du_[i];
      du_[i] = d_[i + 1];
      d_[i + 1] = t - f * d_[i + 1];
      if (i + 2 < n) {
        du2_[i] = du_[i + 1];
        du_[i + 1] = -f * du_[i + 1];
      }
      swapped_[i] = 1;
    }
  }
  for (double v : d_)
    if (v == 0.0 || !std::isfinite(v)) throw IllConditionedError("TridiagonalLU: singular matrix");
}

void TridiagonalLU::solve(std::span<double> b) const {
  const std::size_t n = d_.size();
  if (b.size() != n) throw std::invalid_argument("TridiagonalLU::solve: size mismatch");
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (!swapped_[i]) {
      b[i + 1] -= dl_[i] * b[i];
    } else {
      const double t = b[i];
      b[i] = b[i + 1];
      b[i + 1] = t - dl_[i] * b[i];
    }
  }
  b[n - 1] /= d_[n - 1];
  if (n > 1) b[n - 2] = (b[n - 2] - du_[n - 2] * b[n - 1]) / d_[n - 2];
  for (std::size_t i = n >= 2 ? n - 2 : 0; i-- > 0;)
    b[i] = (b[i] - du_[i] * b[i + 1] - du2_[i] * b[i + 2]) / d_[i];
}

Tridiagonal transpose(const Tridiagonal& J) { return {J.sup, J.diag, J.sub}; }

std::vector<double> multiply(const Tridiagonal& J, std::span<const double> x) {
  const std::size_t n = J.size();
  if (x.size() != n) throw std::invalid_argument("multiply: size mismatch");
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = J.diag[i] * x[i];
    if (i > 0) s += J.sub[i - 1] * x[i - 1];
    if (i + 1 < n) s += J.sup[i] * x[i + 1];
    y[i] = s;
  }
  return y;
}

}  // namespace bhc
