// AVX2 variants of the reference kernels. Compiled per function with
// target("avx2") so the translation unit is safe to link on any x86-64; the
// dispatcher only calls these after a CPUID check.

#include "bhc/kernels.hpp"

#if defined(BHC_HAVE_AVX2)

#include <immintrin.h>

#include <cmath>

#define BHC_AVX2 __attribute__((target("avx2")))

namespace bhc::kernels::avx2 {

namespace {

BHC_AVX2 inline double hsum_pairwise(__m256d v) {
  // (l0 + l2) + (l1 + l3), matching the scalar accumulator order.
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(s) + _mm_cvtsd_f64(_mm_unpackhi_pd(s, s));
}

}  // namespace

BHC_AVX2 void stencil3(const double* lower, const double* upper, const double* u, double shift, double cubic,
                       double* out, std::size_t n) {
  if (n < 3) return;
  const __m256d vs = _mm256_set1_pd(shift);
  const __m256d vc = _mm256_set1_pd(cubic);
  std::size_t i = 1;
  for (; i + 4 <= n - 1; i += 4) {
    const __m256d ui = _mm256_loadu_pd(u + i);
    const __m256d um = _mm256_loadu_pd(u + i - 1);
    const __m256d up = _mm256_loadu_pd(u + i + 1);
    const __m256d fl = _mm256_mul_pd(_mm256_loadu_pd(lower + i), _mm256_sub_pd(um, ui));
    const __m256d fu = _mm256_mul_pd(_mm256_loadu_pd(upper + i), _mm256_sub_pd(up, ui));
    const __m256d flux = _mm256_add_pd(fl, fu);
    const __m256d cube = _mm256_mul_pd(_mm256_mul_pd(ui, ui), ui);
    const __m256d r = _mm256_add_pd(_mm256_add_pd(flux, _mm256_mul_pd(vs, ui)), _mm256_mul_pd(vc, cube));
    _mm256_storeu_pd(out + i, r);
  }
  for (; i + 1 < n; ++i) {
    const double ui = u[i];
    const double flux = lower[i] * (u[i - 1] - ui) + upper[i] * (u[i + 1] - ui);
    out[i] = (flux + shift * ui) + cubic * ((ui * ui) * ui);
  }
}

BHC_AVX2 void stencil3_jacobian_diag(const double* lower, const double* upper, const double* u, double shift,
                                     double cubic, double* out, std::size_t n) {
  if (n < 3) return;
  const double c3 = 3.0 * cubic;
  const __m256d vs = _mm256_set1_pd(shift);
  const __m256d vc = _mm256_set1_pd(c3);
  std::size_t i = 1;
  for (; i + 4 <= n - 1; i += 4) {
    const __m256d ui = _mm256_loadu_pd(u + i);
    const __m256d base = _mm256_sub_pd(_mm256_sub_pd(vs, _mm256_loadu_pd(lower + i)), _mm256_loadu_pd(upper + i));
    _mm256_storeu_pd(out + i, _mm256_add_pd(base, _mm256_mul_pd(vc, _mm256_mul_pd(ui, ui))));
  }
  for (; i + 1 < n; ++i) {
    const double ui = u[i];
    out[i] = ((shift - lower[i]) - upper[i]) + c3 * (ui * ui);
  }
}

BHC_AVX2 double max_abs(const double* x, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) m = _mm256_max_pd(_mm256_andnot_pd(sign, _mm256_loadu_pd(x + i)), m);
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, m);
  double r = 0.0;
  for (double v : lanes) r = v > r ? v : r;
  for (; i < n; ++i) {
    const double a = std::fabs(x[i]);
    r = a > r ? a : r;
  }
  return r;
}

BHC_AVX2 double sum_squares(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(x + i);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(v, v));
  }
  double s = hsum_pairwise(acc);
  for (; i < n; ++i) s = s + x[i] * x[i];
  return s;
}

BHC_AVX2 double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  double s = hsum_pairwise(acc);
  for (; i < n; ++i) s = s + a[i] * b[i];
  return s;
}

}  // namespace bhc::kernels::avx2

#endif  // BHC_HAVE_AVX2
