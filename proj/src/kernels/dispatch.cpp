#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

#include "bhc/kernels.hpp"

namespace bhc::kernels {

namespace {

Backend detect() {
  if (const char* env = std::getenv("BHC_SIMD"); env && std::strcmp(env, "scalar") == 0) return Backend::scalar;
  return backend_available(Backend::avx2) ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> b{detect()};
  return b;
}

void check_sizes(std::size_t n, std::initializer_list<std::size_t> others) {
  for (std::size_t m : others)
    if (m < n) throw std::invalid_argument("kernels: span shorter than u");
}

}  // namespace

std::string_view backend_name(Backend b) { return b == Backend::avx2 ? "avx2" : "scalar"; }

bool backend_available(Backend b) {
  if (b == Backend::scalar) return true;
#if defined(BHC_HAVE_AVX2)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Backend active_backend() { return current().load(std::memory_order_relaxed); }

void set_backend(Backend b) {
  if (!backend_available(b)) throw std::runtime_error("kernels: backend not available on this CPU");
  current().store(b, std::memory_order_relaxed);
}

#if defined(BHC_HAVE_AVX2)
#define BHC_DISPATCH(fn, ...) \
  (active_backend() == Backend::avx2 ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__))
#else
#define BHC_DISPATCH(fn, ...) scalar::fn(__VA_ARGS__)
#endif

void stencil3(std::span<const double> lower, std::span<const double> upper, std::span<const double> u,
              double shift, double cubic, std::span<double> out) {
  check_sizes(u.size(), {lower.size(), upper.size(), out.size()});
  BHC_DISPATCH(stencil3, lower.data(), upper.data(), u.data(), shift, cubic, out.data(), u.size());
}

void stencil3_jacobian_diag(std::span<const double> lower, std::span<const double> upper,
                            std::span<const double> u, double shift, double cubic, std::span<double> out) {
  check_sizes(u.size(), {lower.size(), upper.size(), out.size()});
  BHC_DISPATCH(stencil3_jacobian_diag, lower.data(), upper.data(), u.data(), shift, cubic, out.data(), u.size());
}

double max_abs(std::span<const double> x) { return BHC_DISPATCH(max_abs, x.data(), x.size()); }

double sum_squares(std::span<const double> x) { return BHC_DISPATCH(sum_squares, x.data(), x.size()); }

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("kernels::dot: size mismatch");
  return BHC_DISPATCH(dot, a.data(), b.data(), a.size());
}

#undef BHC_DISPATCH

}  // namespace bhc::kernels
