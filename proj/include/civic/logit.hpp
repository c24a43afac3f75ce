#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "civic/matrix.hpp"

namespace civic::logit {

struct DesignData {
  Matrix x;                        // N rows, one column per coefficient
  std::vector<double> y;           // strictly 0 or 1
  std::vector<std::string> names;  // one per column
};

// Shape and content checks; throws ConfigError.
void validate(const DesignData& d);

// Overflow-safe logistic.
double predict_prob(double xb);

// Row terms are accumulated in fixed-size chunks, so the parallel variants are
// bit-identical to the serial ones for any thread count.
double log_likelihood_serial(const DesignData& d, const std::vector<double>& beta);
double log_likelihood(const DesignData& d, const std::vector<double>& beta);

std::vector<double> gradient_serial(const DesignData& d, const std::vector<double>& beta);
std::vector<double> gradient(const DesignData& d, const std::vector<double>& beta);

// X^T W X with W = diag(p(1-p)); the negated Hessian of the log likelihood.
Matrix neg_hessian_serial(const DesignData& d, const std::vector<double>& beta);
Matrix neg_hessian(const DesignData& d, const std::vector<double>& beta);

struct FitOptions {
  std::size_t max_iterations = 100;
  double grad_tol = 1e-8;
  double ll_tol = 1e-12;
  int max_step_halvings = 30;
  double separation_threshold = 30.0;  // |beta_j| beyond this means separation
};

struct FitResult {
  std::vector<std::string> names;
  std::vector<double> beta;
  std::vector<double> std_error;
  std::vector<double> t_stat;
  double log_lik = 0.0;
  double null_log_lik = 0.0;
  double adjusted_rho_sq = 0.0;
  std::size_t observations = 0;
  std::size_t iterations = 0;
  bool converged = false;
};

// Newton-Raphson from beta = 0 with step halving. Throws StageError on a
// collinear design or quasi-separation; hitting the iteration cap returns the
// last iterate with converged = false.
FitResult fit(const DesignData& d, const FitOptions& opt = {});

// Zero-coefficient null model: -N ln 2.
double null_log_likelihood(std::size_t n);

// 1 - (ll - k) / ll_null, with k counting every coefficient.
double adjusted_rho_squared(double ll, std::size_t k, double ll_null);

// Solves A x = b for symmetric positive definite A; throws StageError
// ("collinear design") when a pivot collapses.
std::vector<double> cholesky_solve(const Matrix& a, const std::vector<double>& b);

}  // namespace civic::logit
