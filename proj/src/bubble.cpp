#include <stdexcept>

#include "bhc/families.hpp"

namespace bhc {

namespace {

double dist2(std::span<const double> x, std::span<const double> c) {
  if (x.size() != c.size()) throw std::invalid_argument("Bubble: point dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - c[i]) * (x[i] - c[i]);
  return s;
}

}  // namespace

Bubble::Bubble(int n, double delta, std::vector<double> center) : n_(n), delta_(delta), center_(std::move(center)) {
  if (n_ < 3) throw std::invalid_argument("Bubble: dimension must be >= 3");
  if (!(delta_ > 0.0)) throw std::invalid_argument("Bubble: delta must be positive");
  if (center_.empty()) center_.assign(static_cast<std::size_t>(n_), 0.0);
  if (center_.size() != static_cast<std::size_t>(n_)) throw std::invalid_argument("Bubble: center dimension mismatch");
}

double Bubble::value(std::span<const double> x) const {
  const double w = 2.0 * delta_ / (delta_ * delta_ + dist2(x, center_));
  return std::pow(w, (n_ - 2) / 2.0);
}

std::vector<double> Bubble::gradient(std::span<const double> x) const {
  const double q = delta_ * delta_ + dist2(x, center_);
  const double w = 2.0 * delta_ / q;
  const double p = (n_ - 2) / 2.0;
  const double c = p * std::pow(w, p - 1.0) * (-4.0 * delta_ / (q * q));
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) g[i] = c * (x[i] - center_[i]);
  return g;
}

double Bubble::laplacian(std::span<const double> x) const {
  // v = w^p: Delta v = p w^(p-1) Delta w + p(p-1) w^(p-2) |grad w|^2
  const double s = dist2(x, center_);
  const double q = delta_ * delta_ + s;
  const double w = 2.0 * delta_ / q;
  const double p = (n_ - 2) / 2.0;
  const double lap_w = -4.0 * delta_ * n_ / (q * q) + 16.0 * delta_ * s / (q * q * q);
  const double grad_w2 = 16.0 * delta_ * delta_ * s / (q * q * q * q);
  return p * std::pow(w, p - 1.0) * lap_w + p * (p - 1.0) * std::pow(w, p - 2.0) * grad_w2;
}

double Bubble::peak() const { return std::pow(2.0 / delta_, (n_ - 2) / 2.0); }

}  // namespace bhc
