#pragma once

// Data-parallel inner loops shared by the residual sweeps and the 1-D
// solvers. Each kernel has a scalar reference implementation and, on x86-64,
// an AVX2 variant selected at runtime. Variants perform the same IEEE
// operations in the same order (no FMA contraction, 4-lane partial sums in the
// reductions), so results are bit-identical across backends.

#include <cstddef>
#include <span>
#include <string_view>

namespace bhc::kernels {

enum class Backend { scalar, avx2 };

std::string_view backend_name(Backend b);
bool backend_available(Backend b);

/// Backend used by the dispatched entry points. Chosen once from CPU features;
/// the environment variable BHC_SIMD=scalar forces the reference path.
Backend active_backend();
/// Override for tests and benchmarks. Throws if the backend is unavailable.
void set_backend(Backend b);

/// Flux-form three-point stencil on interior rows i in [1, n-1):
///   out[i] = lower[i]*(u[i-1]-u[i]) + upper[i]*(u[i+1]-u[i]) + shift*u[i] + cubic*u[i]^3
/// Rows 0 and n-1 of `out` are left untouched.
void stencil3(std::span<const double> lower, std::span<const double> upper, std::span<const double> u,
              double shift, double cubic, std::span<double> out);

/// Jacobian diagonal of stencil3 on interior rows:
///   out[i] = shift - lower[i] - upper[i] + 3*cubic*u[i]^2
void stencil3_jacobian_diag(std::span<const double> lower, std::span<const double> upper,
                            std::span<const double> u, double shift, double cubic, std::span<double> out);

double max_abs(std::span<const double> x);
/// Sum of squares with four interleaved partial sums.
double sum_squares(std::span<const double> x);
/// Dot product with four interleaved partial sums.
double dot(std::span<const double> a, std::span<const double> b);

/// Backend-specific implementations (exposed for equivalence tests).
namespace scalar {
void stencil3(const double* lower, const double* upper, const double* u, double shift, double cubic,
              double* out, std::size_t n);
void stencil3_jacobian_diag(const double* lower, const double* upper, const double* u, double shift,
                            double cubic, double* out, std::size_t n);
double max_abs(const double* x, std::size_t n);
double sum_squares(const double* x, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
}  // namespace scalar

#if defined(BHC_HAVE_AVX2)
namespace avx2 {
void stencil3(const double* lower, const double* upper, const double* u, double shift, double cubic,
              double* out, std::size_t n);
void stencil3_jacobian_diag(const double* lower, const double* upper, const double* u, double shift,
                            double cubic, double* out, std::size_t n);
double max_abs(const double* x, std::size_t n);
double sum_squares(const double* x, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
}  // namespace avx2
#endif

}  // namespace bhc::kernels
