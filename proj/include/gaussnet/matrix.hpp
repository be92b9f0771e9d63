#ifndef GAUSSNET_MATRIX_HPP_
#define GAUSSNET_MATRIX_HPP_

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include "gaussnet/errors.hpp"

namespace gaussnet {

/// Small dense row-major matrix. Only what the covariance code needs.
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> init) {
    rows_ = init.size();
    cols_ = rows_ == 0 ? 0 : init.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& row : init) {
      if (row.size() != cols_) throw DomainError("ragged matrix initializer");
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  [[nodiscard]] std::size_t rows() const { return rows_; }
  [[nodiscard]] std::size_t cols() const { return cols_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  [[nodiscard]] const std::vector<double>& data() const { return data_; }

  [[nodiscard]] double frobenius_norm() const {
    double acc = 0.0;
    for (double v : data_) acc += v * v;
    return std::sqrt(acc);
  }

  [[nodiscard]] double trace() const {
    double acc = 0.0;
    for (std::size_t i = 0; i < rows_ && i < cols_; ++i) acc += (*this)(i, i);
    return acc;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Lower-triangular L with L L^T = a. Throws SingularCovarianceError when a
/// is not numerically positive definite.
inline Matrix cholesky(const Matrix& a) {
  if (a.rows() != a.cols()) throw DomainError("cholesky needs a square matrix");
  const std::size_t n = a.rows();
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 1e-12 * std::abs(a(j, j))) || !(d > 0.0)) {
      throw SingularCovarianceError("matrix is not positive definite (pivot " +
                                    std::to_string(j) + ")");
    }
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  return l;
}

} // namespace gaussnet

#endif // GAUSSNET_MATRIX_HPP_
