#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace latentdim {

/// Forward-mode dual number carrying a dense gradient over a fixed list of
/// coordinates. An empty gradient stands for a constant.
///
/// Works over any field-like T; with T = Rational every value and partial is exact.
template <class T>
class Dual {
 public:
  Dual() : value_(0) {}
  Dual(int constant) : value_(constant) {}
  Dual(T value) : value_(std::move(value)) {}
  Dual(T value, std::vector<T> gradient) : value_(std::move(value)), grad_(std::move(gradient)) {}

  /// Coordinate `index` out of `dimension`, with unit partial.
  static Dual variable(T value, std::size_t dimension, std::size_t index) {
    std::vector<T> grad(dimension, T(0));
    grad[index] = T(1);
    return Dual(std::move(value), std::move(grad));
  }

  const T& value() const { return value_; }
  const std::vector<T>& gradient() const { return grad_; }
  T partial(std::size_t index) const { return index < grad_.size() ? grad_[index] : T(0); }

  Dual& operator+=(const Dual& o) {
    value_ += o.value_;
    grow(o.grad_.size());
    for (std::size_t c = 0; c < o.grad_.size(); ++c) grad_[c] += o.grad_[c];
    return *this;
  }

  Dual& operator-=(const Dual& o) {
    value_ -= o.value_;
    grow(o.grad_.size());
    for (std::size_t c = 0; c < o.grad_.size(); ++c) grad_[c] -= o.grad_[c];
    return *this;
  }

  // (xy)' = x'y + xy'
  Dual& operator*=(const Dual& o) {
    for (auto& g : grad_) g *= o.value_;
    grow(o.grad_.size());
    for (std::size_t c = 0; c < o.grad_.size(); ++c) grad_[c] += value_ * o.grad_[c];
    value_ *= o.value_;
    return *this;
  }

  // (x/y)' = (x'y - xy') / y^2
  Dual& operator/=(const Dual& o) {
    T inv = T(1) / o.value_;
    T quotient = value_ * inv;
    for (auto& g : grad_) g *= inv;
    grow(o.grad_.size());
    for (std::size_t c = 0; c < o.grad_.size(); ++c) grad_[c] -= quotient * o.grad_[c] * inv;
    value_ = quotient;
    return *this;
  }

  Dual operator-() const {
    Dual out(*this);
    out.value_ = -out.value_;
    for (auto& g : out.grad_) g = -g;
    return out;
  }

  friend Dual operator+(Dual a, const Dual& b) { return a += b; }
  friend Dual operator-(Dual a, const Dual& b) { return a -= b; }
  friend Dual operator*(Dual a, const Dual& b) { return a *= b; }
  friend Dual operator/(Dual a, const Dual& b) { return a /= b; }

 private:
  void grow(std::size_t n) {
    if (grad_.size() < n) grad_.resize(n, T(0));
  }

  T value_;
  std::vector<T> grad_;
};

template <class T>
struct is_dual : std::false_type {};
template <class T>
struct is_dual<Dual<T>> : std::true_type {};

inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline Dual<double> logistic(const Dual<double>& x) {
  double s = logistic(x.value());
  std::vector<double> grad(x.gradient());
  for (auto& g : grad) g *= s * (1.0 - s);
  return Dual<double>(s, std::move(grad));
}

}  // namespace latentdim
