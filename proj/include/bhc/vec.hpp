#pragma once

// Small fixed-size vectors and matrices for pointwise differential geometry
// on R^N. Everything is constexpr-friendly value types; no allocation.

#include <array>
#include <cmath>
#include <cstddef>

namespace bhc {

template <std::size_t N>
struct Vec {
  std::array<double, N> c{};

  constexpr Vec() = default;
  template <class... T>
    requires(sizeof...(T) == N && N > 0)
  constexpr Vec(T... v) : c{static_cast<double>(v)...} {}

  constexpr double& operator[](std::size_t i) { return c[i]; }
  constexpr const double& operator[](std::size_t i) const { return c[i]; }
  static constexpr std::size_t size() { return N; }

  constexpr Vec& operator+=(const Vec& o) {
    for (std::size_t i = 0; i < N; ++i) c[i] += o.c[i];
    return *this;
  }
  constexpr Vec& operator-=(const Vec& o) {
    for (std::size_t i = 0; i < N; ++i) c[i] -= o.c[i];
    return *this;
  }
  constexpr Vec& operator*=(double s) {
    for (auto& v : c) v *= s;
    return *this;
  }

  friend constexpr Vec operator+(Vec a, const Vec& b) { return a += b; }
  friend constexpr Vec operator-(Vec a, const Vec& b) { return a -= b; }
  friend constexpr Vec operator-(Vec a) { return a *= -1.0; }
  friend constexpr Vec operator*(double s, Vec a) { return a *= s; }
  friend constexpr Vec operator*(Vec a, double s) { return a *= s; }
  friend constexpr Vec operator/(Vec a, double s) {
    for (auto& v : a.c) v /= s;
    return a;
  }
  friend constexpr bool operator==(const Vec&, const Vec&) = default;

  static constexpr Vec unit(std::size_t i) {
    Vec e;
    e.c[i] = 1.0;
    return e;
  }
};

template <std::size_t N>
constexpr double dot(const Vec<N>& a, const Vec<N>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < N; ++i) s += a[i] * b[i];
  return s;
}

template <std::size_t N>
constexpr double norm2(const Vec<N>& a) {
  return dot(a, a);
}

template <std::size_t N>
inline double norm(const Vec<N>& a) {
  return std::sqrt(norm2(a));
}

template <std::size_t N>
inline double max_abs(const Vec<N>& a) {
  double m = 0.0;
  for (double v : a.c) m = std::fmax(m, std::fabs(v));
  return m;
}

/// Row-major N x N matrix.
template <std::size_t N>
struct Mat {
  std::array<Vec<N>, N> rows{};

  constexpr double& operator()(std::size_t i, std::size_t j) { return rows[i][j]; }
  constexpr const double& operator()(std::size_t i, std::size_t j) const { return rows[i][j]; }

  constexpr Mat& operator+=(const Mat& o) {
    for (std::size_t i = 0; i < N; ++i) rows[i] += o.rows[i];
    return *this;
  }
  constexpr Mat& operator-=(const Mat& o) {
    for (std::size_t i = 0; i < N; ++i) rows[i] -= o.rows[i];
    return *this;
  }
  constexpr Mat& operator*=(double s) {
    for (auto& r : rows) r *= s;
    return *this;
  }
  friend constexpr Mat operator+(Mat a, const Mat& b) { return a += b; }
  friend constexpr Mat operator-(Mat a, const Mat& b) { return a -= b; }
  friend constexpr Mat operator*(double s, Mat a) { return a *= s; }
  friend constexpr Mat operator*(Mat a, double s) { return a *= s; }
  friend constexpr bool operator==(const Mat&, const Mat&) = default;

  friend constexpr Vec<N> operator*(const Mat& m, const Vec<N>& v) {
    Vec<N> out;
    for (std::size_t i = 0; i < N; ++i) out[i] = dot(m.rows[i], v);
    return out;
  }
  friend constexpr Mat operator*(const Mat& a, const Mat& b) {
    Mat out;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < N; ++k) s += a(i, k) * b(k, j);
        out(i, j) = s;
      }
    return out;
  }

  static constexpr Mat identity() {
    Mat m;
    for (std::size_t i = 0; i < N; ++i) m(i, i) = 1.0;
    return m;
  }
  static constexpr Mat diagonal(double s) { return s * identity(); }
};

template <std::size_t N>
constexpr Mat<N> transpose(const Mat<N>& m) {
  Mat<N> t;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) t(i, j) = m(j, i);
  return t;
}

template <std::size_t N>
constexpr double trace(const Mat<N>& m) {
  double s = 0.0;
  for (std::size_t i = 0; i < N; ++i) s += m(i, i);
  return s;
}

/// a b^T
template <std::size_t N>
constexpr Mat<N> outer(const Vec<N>& a, const Vec<N>& b) {
  Mat<N> m;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) m(i, j) = a[i] * b[j];
  return m;
}

template <std::size_t N>
inline double max_abs(const Mat<N>& m) {
  double r = 0.0;
  for (const auto& row : m.rows) r = std::fmax(r, max_abs(row));
  return r;
}

using Vec4 = Vec<4>;
using Mat4 = Mat<4>;
using Point4 = Vec4;

}  // namespace bhc
