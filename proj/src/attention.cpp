#include "civic/attention.hpp"

#include <cmath>
#include <stdexcept>

#include "civic/common.hpp"

namespace civic::attn {

namespace {

void check_head(const Matrix& y, const HeadParams& p) {
  if (y.rows() == 0 || y.cols() == 0) throw std::invalid_argument("attention: empty input");
  if (p.w_q.rows() != y.cols() || p.w_k.rows() != y.cols() || p.w_v.rows() != y.cols())
    throw std::invalid_argument("attention: projection rows must match input width");
  if (p.w_q.cols() != p.w_k.cols())
    throw std::invalid_argument("attention: w_q and w_k must agree on d_k");
  if (p.w_q.cols() == 0 || p.w_v.cols() == 0)
    throw std::invalid_argument("attention: zero-width projection");
}

}  // namespace

Matrix scaled_scores(const Matrix& q, const Matrix& k) {
  if (q.cols() != k.cols()) throw std::invalid_argument("scores: d_k mismatch");
  const double inv = 1.0 / std::sqrt(static_cast<double>(q.cols()));
  Matrix s = matmul(q, transpose(k));
  for (std::size_t i = 0; i < s.rows(); ++i)
    for (std::size_t j = 0; j < s.cols(); ++j) s(i, j) *= inv;
  return s;
}

Matrix softmax_rows(const Matrix& scores) {
  Matrix out(scores.rows(), scores.cols());
  for (std::size_t i = 0; i < scores.rows(); ++i) {
    double mx = scores(i, 0);
    for (std::size_t j = 1; j < scores.cols(); ++j) mx = std::max(mx, scores(i, j));
    double denom = 0.0;
    for (std::size_t j = 0; j < scores.cols(); ++j) {
      out(i, j) = std::exp(scores(i, j) - mx);
      denom += out(i, j);
    }
    for (std::size_t j = 0; j < scores.cols(); ++j) out(i, j) /= denom;
  }
  return out;
}

Matrix attention_weights(const Matrix& y, const HeadParams& p) {
  check_head(y, p);
  return softmax_rows(scaled_scores(matmul(y, p.w_q), matmul(y, p.w_k)));
}

Matrix attend(const Matrix& y, const HeadParams& p) {
  return matmul(attention_weights(y, p), matmul(y, p.w_v));
}

Matrix multi_head(const Matrix& y, const std::vector<HeadParams>& heads) {
  if (heads.empty()) throw std::invalid_argument("attention: no heads");
  std::vector<Matrix> outs;
  std::size_t total_cols = 0;
  for (const auto& h : heads) {
    outs.push_back(attend(y, h));
    total_cols += outs.back().cols();
  }
  Matrix cat(y.rows(), total_cols);
  std::size_t off = 0;
  for (const auto& o : outs) {
    for (std::size_t i = 0; i < o.rows(); ++i)
      for (std::size_t j = 0; j < o.cols(); ++j) cat(i, off + j) = o(i, j);
    off += o.cols();
  }
  return cat;
}

Matrix input_jacobian(const Matrix& y, const HeadParams& p) {
  check_head(y, p);
  const std::size_t n = y.rows();
  const std::size_t d = y.cols();
  const std::size_t dk = p.w_q.cols();
  const std::size_t dv = p.w_v.cols();
  const double inv = 1.0 / std::sqrt(static_cast<double>(dk));

  Matrix q = matmul(y, p.w_q);
  Matrix k = matmul(y, p.w_k);
  Matrix v = matmul(y, p.w_v);
  Matrix a = softmax_rows(scaled_scores(q, k));
  Matrix o = matmul(a, v);

  // pb(j,b) = sum_a w_q(b,a) k(j,a);  r(i,b) = sum_a q(i,a) w_k(b,a)
  Matrix pb = matmul(k, transpose(p.w_q));
  Matrix r = matmul(q, transpose(p.w_k));
  // pbar(i,b) = sum_l a(i,l) pb(l,b)
  Matrix pbar = matmul(a, pb);

  Matrix jac(n * dv, n * d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < dv; ++c) {
      const std::size_t row = i * dv + c;
      for (std::size_t m = 0; m < n; ++m) {
        for (std::size_t b = 0; b < d; ++b) {
          double g = a(i, m) * p.w_v(b, c);  // through v
          g += inv * a(i, m) * r(i, b) * (v(m, c) - o(i, c));  // through k of row m
          if (i == m) {  // through q of row i
            double t = 0.0;
            for (std::size_t j = 0; j < n; ++j) t += a(i, j) * pb(j, b) * v(j, c);
            g += inv * (t - pbar(i, b) * o(i, c));
          }
          jac(row, m * d + b) = g;
        }
      }
    }
  }
  return jac;
}

Matrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("matrix: expected a non-empty array of rows");
  const std::size_t rows = j.size();
  if (!j[0].is_array() || j[0].empty()) throw ConfigError("matrix: rows must be non-empty arrays");
  const std::size_t cols = j[0].size();
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols) throw ConfigError("matrix: ragged rows");
    for (std::size_t c = 0; c < cols; ++c) m(i, c) = j[i][c].get<double>();
  }
  return m;
}

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace civic::attn
