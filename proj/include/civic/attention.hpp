#pragma once

#include <vector>

#include <nlohmann/json.hpp>

#include "civic/matrix.hpp"

namespace civic::attn {

// Projection weights for one attention head. w_q and w_k must agree on their
// column count d_k; w_v sets the head's output width d_v.
struct HeadParams {
  Matrix w_q;
  Matrix w_k;
  Matrix w_v;
};

// q kT / sqrt(d_k)
Matrix scaled_scores(const Matrix& q, const Matrix& k);

// Row-wise softmax with per-row max subtraction, safe for huge logits.
Matrix softmax_rows(const Matrix& scores);

// softmax(scaled_scores(y w_q, y w_k)); rows sum to one.
Matrix attention_weights(const Matrix& y, const HeadParams& p);

// attention_weights(y, p) * (y w_v)
Matrix attend(const Matrix& y, const HeadParams& p);

// Heads run independently; their outputs are concatenated column-wise.
Matrix multi_head(const Matrix& y, const std::vector<HeadParams>& heads);

// Jacobian of the flattened head output with respect to the flattened input,
// both row-major: entry (i*d_v + c, m*d + b) = d out(i,c) / d y(m,b).
Matrix input_jacobian(const Matrix& y, const HeadParams& p);

// JSON helpers for the CLI demo: a matrix is a list of equal-length rows.
Matrix matrix_from_json(const nlohmann::json& j);
nlohmann::json matrix_to_json(const Matrix& m);

}  // namespace civic::attn
