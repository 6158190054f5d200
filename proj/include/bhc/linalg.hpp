#pragma once

// Banded direct solves used by the 1-D Newton iterations.

#include <span>
#include <vector>

#include "bhc/solver.hpp"

namespace bhc {

/// LU factorization of a tridiagonal matrix with partial pivoting (one
/// extra superdiagonal of fill).
class TridiagonalLU {
 public:
  explicit TridiagonalLU(const Tridiagonal& J);

  /// Solves J x = b in place. Throws IllConditionedError on a zero pivot.
  void solve(std::span<double> b) const;

 private:
  std::vector<double> dl_, d_, du_, du2_;
  std::vector<unsigned char> swapped_;
};

Tridiagonal transpose(const Tridiagonal& J);
std::vector<double> multiply(const Tridiagonal& J, std::span<const double> x);

}  // namespace bhc
