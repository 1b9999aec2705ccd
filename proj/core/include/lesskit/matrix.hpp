#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "lesskit/errors.hpp"

namespace lesskit {

class DenseVector {
 public:
  DenseVector() = default;
  explicit DenseVector(std::size_t len, double fill = 0.0) : data_(len, fill) {}
  DenseVector(std::initializer_list<double> xs) : data_(xs) {}

  std::size_t len() const { return data_.size(); }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  double squared_norm() const {
    double s = 0.0;
    for (double x : data_) s += x * x;
    return s;
  }
  double norm() const { return std::sqrt(squared_norm()); }

  bool all_finite() const {
    for (double x : data_)
      if (!std::isfinite(x)) return false;
    return true;
  }

 private:
  std::vector<double> data_;
};

// Column-major dense matrix. Sketch application sweeps columns, so columns
// are kept contiguous.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  // Row-by-row construction helper for small literals in tests and examples.
  static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    DenseMatrix m(rows.size(), rows.size() ? rows.begin()->size() : 0);
    std::size_t i = 0;
    for (const auto& row : rows) {
      std::size_t j = 0;
      for (double x : row) m(i, j++) = x;
      ++i;
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[j * rows_ + i]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[j * rows_ + i]; }

  std::span<double> col(std::size_t j) { return {data_.data() + j * rows_, rows_}; }
  std::span<const double> col(std::size_t j) const { return {data_.data() + j * rows_, rows_}; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  DenseVector row_copy(std::size_t i) const {
    DenseVector r(cols_);
    for (std::size_t j = 0; j < cols_; ++j) r[j] = (*this)(i, j);
    return r;
  }

  DenseVector col_copy(std::size_t j) const {
    DenseVector c(rows_);
    auto cj = col(j);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = cj[i];
    return c;
  }

  bool all_finite() const {
    for (double x : data_)
      if (!std::isfinite(x)) return false;
    return true;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

inline double dot(const DenseVector& x, const DenseVector& y) {
  return dot(x.data(), y.data());
}

inline double frobenius_norm(const DenseMatrix& a) {
  double s = 0.0;
  for (double x : a.data()) s += x * x;
  return std::sqrt(s);
}

inline DenseVector matvec(const DenseMatrix& a, const DenseVector& x) {
  if (x.len() != a.cols()) throw DimensionMismatchError("matvec: size mismatch");
  DenseVector y(a.rows());
  for (std::size_t j = 0; j < a.cols(); ++j) {
    const double xj = x[j];
    auto cj = a.col(j);
    for (std::size_t i = 0; i < a.rows(); ++i) y[i] += cj[i] * xj;
  }
  return y;
}

// y = Aᵀx
inline DenseVector matvec_transposed(const DenseMatrix& a, const DenseVector& x) {
  if (x.len() != a.rows()) throw DimensionMismatchError("matvec_transposed: size mismatch");
  DenseVector y(a.cols());
  for (std::size_t j = 0; j < a.cols(); ++j) y[j] = dot(a.col(j), x.data());
  return y;
}

inline DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionMismatchError("matmul: size mismatch");
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    auto cj = c.col(j);
    for (std::size_t l = 0; l < a.cols(); ++l) {
      const double blj = b(l, j);
      if (blj == 0.0) continue;
      auto al = a.col(l);
      for (std::size_t i = 0; i < a.rows(); ++i) cj[i] += al[i] * blj;
    }
  }
  return c;
}

inline DenseMatrix transpose(const DenseMatrix& a) {
  DenseMatrix t(a.cols(), a.rows());
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i) t(j, i) = a(i, j);
  return t;
}

// AᵀA without forming the transpose.
inline DenseMatrix gram(const DenseMatrix& a) {
  DenseMatrix g(a.cols(), a.cols());
  for (std::size_t j = 0; j < a.cols(); ++j) {
    for (std::size_t i = 0; i <= j; ++i) {
      const double s = dot(a.col(i), a.col(j));
      g(i, j) = s;
      g(j, i) = s;
    }
  }
  return g;
}

inline DenseVector subtract(const DenseVector& x, const DenseVector& y) {
  DenseVector z(x.len());
  for (std::size_t i = 0; i < x.len(); ++i) z[i] = x[i] - y[i];
  return z;
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

}  // namespace lesskit
