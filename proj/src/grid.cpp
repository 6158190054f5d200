#include "bhc/grid.hpp"

namespace bhc {

double radical_inverse(std::uint64_t index, unsigned base) {
  const double inv = 1.0 / base;
  double f = inv, r = 0.0;
  while (index > 0) {
    r += f * static_cast<double>(index % base);
    index /= base;
    f *= inv;
  }
  return r;
}

}  // namespace bhc
