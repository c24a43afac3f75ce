#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace civic {

// Dense row-major matrix of doubles. Small sizes only; no BLAS.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  double* row(std::size_t i) { return data_.data() + i * cols_; }
  const double* row(std::size_t i) const { return data_.data() + i * cols_; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  bool operator==(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// a (n x k) * b (k x m). The parallel variant splits over output rows; each row
// is computed in full by one thread, so results are bit-identical to serial.
Matrix matmul_serial(const Matrix& a, const Matrix& b);
Matrix matmul(const Matrix& a, const Matrix& b);

Matrix transpose(const Matrix& m);

bool all_finite(const Matrix& m);

}  // namespace civic
