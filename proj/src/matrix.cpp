#include "civic/matrix.hpp"

#include <cmath>

#include "civic/parallel.hpp"

namespace civic {

namespace {

inline void matmul_row(const Matrix& a, const Matrix& b, Matrix& out, std::size_t i) {
  const std::size_t k = a.cols();
  const std::size_t m = b.cols();
  const double* arow = a.row(i);
  double* orow = out.row(i);
  for (std::size_t j = 0; j < m; ++j) orow[j] = 0.0;
  for (std::size_t p = 0; p < k; ++p) {
    const double av = arow[p];
    const double* brow = b.row(p);
    for (std::size_t j = 0; j < m; ++j) orow[j] += av * brow[j];
  }
}

}  // namespace

Matrix matmul_serial(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul: dimension mismatch");
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) matmul_row(a, b, out, i);
  return out;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul: dimension mismatch");
  Matrix out(a.rows(), b.cols());
  par::parallel_for(a.rows(), [&](std::size_t i) { matmul_row(a, b, out, i); });
  return out;
}

Matrix transpose(const Matrix& m) {
  Matrix out(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(j, i) = m(i, j);
  return out;
}

bool all_finite(const Matrix& m) {
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (!std::isfinite(m(i, j))) return false;
  return true;
}

}  // namespace civic
