#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <vector>

#include "latentdim/rational.hpp"

namespace latentdim {

/// Dense row-major matrix.
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, T(0)) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  const std::vector<T>& data() const { return data_; }

  template <class U, class F>
  Matrix<U> transform(F&& f) const {
    Matrix<U> out(rows_, cols_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) out(r, c) = f((*this)(r, c));
    return out;
  }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

inline Matrix<double> to_real(const Matrix<Rational>& m) {
  return m.transform<double>([](const Rational& v) { return v.get_d(); });
}

/// Plain-text dump, one row per line, tab separated; rationals render exactly.
template <class T>
void write_matrix(std::ostream& out, const Matrix<T>& m) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) out << '\t';
      if constexpr (std::is_same_v<T, Rational>) {
        out << to_string(m(r, c));
      } else {
        out << m(r, c);
      }
    }
    out << '\n';
  }
}

}  // namespace latentdim
