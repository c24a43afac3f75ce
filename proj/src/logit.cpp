#include "civic/logit.hpp"

#include <algorithm>
#include <cmath>

#include "civic/common.hpp"
#include "civic/parallel.hpp"

namespace civic::logit {

void validate(const DesignData& d) {
  const std::size_t n = d.x.rows();
  const std::size_t k = d.x.cols();
  if (n == 0 || k == 0) throw ConfigError("logit: empty design");
  if (d.y.size() != n) throw ConfigError("logit: y length does not match the design");
  if (d.names.size() != k) throw ConfigError("logit: need one name per column");
  if (k >= n) throw ConfigError("logit: more coefficients than observations");
  for (double v : d.y)
    if (v != 0.0 && v != 1.0) throw ConfigError("logit: outcomes must be 0 or 1");
  if (!all_finite(d.x)) throw ConfigError("logit: non-finite design entry");
}

double predict_prob(double xb) {
  if (xb >= 0.0) return 1.0 / (1.0 + std::exp(-xb));
  const double e = std::exp(xb);
  return e / (1.0 + e);
}

namespace {

double row_xb(const DesignData& d, const std::vector<double>& beta, std::size_t i) {
  const double* row = d.x.row(i);
  double xb = 0.0;
  for (std::size_t j = 0; j < beta.size(); ++j) xb += row[j] * beta[j];
  return xb;
}

// log likelihood of one observation, stable for any magnitude of xb
double row_ll(const DesignData& d, const std::vector<double>& beta, std::size_t i) {
  const double z = row_xb(d, beta, i);
  if (d.y[i] == 1.0) return z >= 0.0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z));
  return z >= 0.0 ? -z - std::log1p(std::exp(-z)) : -std::log1p(std::exp(z));
}

template <bool Parallel>
double ll_impl(const DesignData& d, const std::vector<double>& beta) {
  auto term = [&](std::size_t i) { return row_ll(d, beta, i); };
  if constexpr (Parallel) return par::chunked_sum_parallel(d.x.rows(), term);
  return par::chunked_sum_serial(d.x.rows(), term);
}

template <bool Parallel>
std::vector<double> grad_impl(const DesignData& d, const std::vector<double>& beta) {
  const std::size_t k = d.x.cols();
  auto term = [&](std::size_t i, double* out) {
    const double resid = d.y[i] - predict_prob(row_xb(d, beta, i));
    const double* row = d.x.row(i);
    for (std::size_t j = 0; j < k; ++j) out[j] += row[j] * resid;
  };
  if constexpr (Parallel) return par::chunked_vsum_parallel(d.x.rows(), k, term);
  return par::chunked_vsum_serial(d.x.rows(), k, term);
}

template <bool Parallel>
Matrix hess_impl(const DesignData& d, const std::vector<double>& beta) {
  const std::size_t k = d.x.cols();
  const std::size_t tri = k * (k + 1) / 2;  // packed upper triangle
  auto term = [&](std::size_t i, double* out) {
    const double p = predict_prob(row_xb(d, beta, i));
    const double w = p * (1.0 - p);
    const double* row = d.x.row(i);
    std::size_t t = 0;
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = a; b < k; ++b) out[t++] += w * row[a] * row[b];
  };
  std::vector<double> packed = Parallel ? par::chunked_vsum_parallel(d.x.rows(), tri, term)
                                        : par::chunked_vsum_serial(d.x.rows(), tri, term);
  Matrix h(k, k);
  std::size_t t = 0;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a; b < k; ++b) {
      h(a, b) = packed[t];
      h(b, a) = packed[t];
      ++t;
    }
  }
  return h;
}

}  // namespace

double log_likelihood_serial(const DesignData& d, const std::vector<double>& beta) {
  return ll_impl<false>(d, beta);
}
double log_likelihood(const DesignData& d, const std::vector<double>& beta) {
  return ll_impl<true>(d, beta);
}
std::vector<double> gradient_serial(const DesignData& d, const std::vector<double>& beta) {
  return grad_impl<false>(d, beta);
}
std::vector<double> gradient(const DesignData& d, const std::vector<double>& beta) {
  return grad_impl<true>(d, beta);
}
Matrix neg_hessian_serial(const DesignData& d, const std::vector<double>& beta) {
  return hess_impl<false>(d, beta);
}
Matrix neg_hessian(const DesignData& d, const std::vector<double>& beta) {
  return hess_impl<true>(d, beta);
}

std::vector<double> cholesky_solve(const Matrix& a, const std::vector<double>& b) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.size() != n) throw ConfigError("cholesky: shape mismatch");
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double diag = a(j, j);
    for (std::size_t p = 0; p < j; ++p) diag -= l(j, p) * l(j, p);
    if (!(diag > 1e-12)) throw StageError("collinear design");
    l(j, j) = std::sqrt(diag);
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = a(i, j);
      for (std::size_t p = 0; p < j; ++p) v -= l(i, p) * l(j, p);
      l(i, j) = v / l(j, j);
    }
  }
  // forward then backward substitution
  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; ++i) {
    double v = b[i];
    for (std::size_t p = 0; p < i; ++p) v -= l(i, p) * z[p];
    z[i] = v / l(i, i);
  }
  std::vector<double> x(n);
  for (std::size_t ii = n; ii-- > 0;) {
    double v = z[ii];
    for (std::size_t p = ii + 1; p < n; ++p) v -= l(p, ii) * x[p];
    x[ii] = v / l(ii, ii);
  }
  return x;
}

double null_log_likelihood(std::size_t n) {
  return -static_cast<double>(n) * std::log(2.0);
}

double adjusted_rho_squared(double ll, std::size_t k, double ll_null) {
  if (ll_null == 0.0) throw ConfigError("rho-squared: zero null likelihood");
  return 1.0 - (ll - static_cast<double>(k)) / ll_null;
}

FitResult fit(const DesignData& d, const FitOptions& opt) {
  validate(d);
  const std::size_t k = d.x.cols();
  std::vector<double> beta(k, 0.0);
  double ll = log_likelihood(d, beta);

  FitResult r;
  r.names = d.names;
  r.observations = d.x.rows();
  r.null_log_lik = null_log_likelihood(d.x.rows());

  for (std::size_t iter = 1; iter <= opt.max_iterations; ++iter) {
    std::vector<double> g = gradient(d, beta);
    double gmax = 0.0;
    for (double v : g) gmax = std::max(gmax, std::abs(v));
    if (gmax < opt.grad_tol) {
      r.converged = true;
      r.iterations = iter - 1;
      break;
    }

    Matrix h = neg_hessian(d, beta);
    std::vector<double> delta = cholesky_solve(h, g);

    double step = 1.0;
    double cand_ll = ll;
    std::vector<double> cand(k);
    bool accepted = false;
    for (int halvings = 0; halvings <= opt.max_step_halvings; ++halvings) {
      for (std::size_t j = 0; j < k; ++j) cand[j] = beta[j] + step * delta[j];
      cand_ll = log_likelihood(d, cand);
      if (cand_ll > ll || std::abs(cand_ll - ll) < opt.ll_tol) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) throw StageError("logit: step halving failed to improve the likelihood");

    const double delta_ll = std::abs(cand_ll - ll);
    beta = cand;
    ll = cand_ll;
    r.iterations = iter;

    for (double v : beta)
      if (std::abs(v) > opt.separation_threshold)
        throw StageError("logit: quasi-separation detected (coefficient diverging)");

    if (delta_ll < opt.ll_tol) {
      r.converged = true;
      break;
    }
  }
  // not converging inside max_iterations is reported, not thrown

  r.beta = beta;
  r.log_lik = ll;
  r.adjusted_rho_sq = adjusted_rho_squared(ll, k, r.null_log_lik);

  // standard errors from the inverse negated Hessian at the optimum
  Matrix h = neg_hessian(d, beta);
  r.std_error.resize(k);
  r.t_stat.resize(k);
  std::vector<double> unit(k, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    std::fill(unit.begin(), unit.end(), 0.0);
    unit[j] = 1.0;
    std::vector<double> col = cholesky_solve(h, unit);
    r.std_error[j] = std::sqrt(col[j]);
    r.t_stat[j] = r.beta[j] / r.std_error[j];
  }
  return r;
}

}  // namespace civic::logit
