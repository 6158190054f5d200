// Scalar reference kernels. The arithmetic order here is the contract the
// SIMD variants reproduce.

#include <cmath>

#include "bhc/kernels.hpp"

namespace bhc::kernels::scalar {

void stencil3(const double* lower, const double* upper, const double* u, double shift, double cubic,
              double* out, std::size_t n) {
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double ui = u[i];
    const double flux = lower[i] * (u[i - 1] - ui) + upper[i] * (u[i + 1] - ui);
    out[i] = (flux + shift * ui) + cubic * ((ui * ui) * ui);
  }
}

void stencil3_jacobian_diag(const double* lower, const double* upper, const double* u, double shift,
                            double cubic, double* out, std::size_t n) {
  const double c3 = 3.0 * cubic;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double ui = u[i];
    out[i] = ((shift - lower[i]) - upper[i]) + c3 * (ui * ui);
  }
}

double max_abs(const double* x, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = std::fabs(x[i]);
    m = a > m ? a : m;
  }
  return m;
}

double sum_squares(const double* x, std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    for (std::size_t l = 0; l < 4; ++l) acc[l] = acc[l] + x[i + l] * x[i + l];
  double s = (acc[0] + acc[2]) + (acc[1] + acc[3]);
  for (; i < n; ++i) s = s + x[i] * x[i];
  return s;
}

double dot(const double* a, const double* b, std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    for (std::size_t l = 0; l < 4; ++l) acc[l] = acc[l] + a[i + l] * b[i + l];
  double s = (acc[0] + acc[2]) + (acc[1] + acc[3]);
  for (; i < n; ++i) s = s + a[i] * b[i];
  return s;
}

}  // namespace bhc::kernels::scalar
