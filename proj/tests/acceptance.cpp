// Acceptance gate: one pass/fail line per release criterion, nonzero exit if
// any fail. Each check pins an arithmetic identity, a hand-computed oracle or
// a property that must hold for the shipped binaries.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "civic/attention.hpp"
#include "civic/common.hpp"
#include "civic/config.hpp"
#include "civic/geo.hpp"
#include "civic/lda.hpp"
#include "civic/logit.hpp"
#include "civic/name_model.hpp"
#include "civic/pipeline.hpp"
#include "civic/report.hpp"
#include "civic/rng.hpp"

using namespace civic;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

class Criterion {
 public:
  Criterion(int number, const std::string& title, double budget_seconds)
      : number_(number), title_(title), budget_(budget_seconds),
        start_(std::chrono::steady_clock::now()) {}

  void expect(bool ok, const std::string& detail) {
    if (!ok) {
      failed_ = true;
      details_.push_back(detail);
    }
  }

  void finish() {
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    if (budget_ > 0 && elapsed > budget_) {
      failed_ = true;
      details_.push_back("runtime " + std::to_string(elapsed) + "s exceeds budget");
    }
    std::printf("%s  %2d  %s (%.2fs)\n", failed_ ? "FAIL" : "PASS", number_, title_.c_str(),
                elapsed);
    for (const auto& d : details_) std::printf("          - %s\n", d.c_str());
    if (failed_) ++g_failures;
  }

 private:
  int number_;
  std::string title_;
  double budget_;
  std::chrono::steady_clock::time_point start_;
  bool failed_ = false;
  std::vector<std::string> details_;
};

double frand(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

// cyclic Jacobi eigenvalues for small symmetric matrices
std::vector<double> jacobi_eigenvalues(Matrix a) {
  const std::size_t n = a.rows();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-24) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::fabs(a(p, q)) < 1e-18) continue;
        const double theta = 0.5 * std::atan2(2.0 * a(p, q), a(q, q) - a(p, p));
        const double c = std::cos(theta), s = std::sin(theta);
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = a(i, i);
  return eig;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// ---------------------------------------------------------------------------

void criterion_null_ll() {
  Criterion c(1, "null model log-likelihood matches -N ln 2 at N = 36098", 1.0);
  const double v = logit::null_log_likelihood(36098);
  c.expect(std::fabs(v - (-25021.22)) < 0.01, "got " + std::to_string(v));
  c.finish();
}

void criterion_rho_sq() {
  Criterion c(2, "adjusted rho-squared reproduces the three reported fit indices", 1.0);
  const double ll0 = logit::null_log_likelihood(36098);
  const struct { double ll; std::size_t k; double want; } cases[] = {
      {-4659.241, 16, 0.813}, {-4695.159, 15, 0.812}, {-4418.215, 11, 0.823}};
  for (const auto& cs : cases) {
    const double got = logit::adjusted_rho_squared(cs.ll, cs.k, ll0);
    c.expect(std::fabs(got - cs.want) < 5e-4,
             "ll " + std::to_string(cs.ll) + " gave " + std::to_string(got));
  }
  c.finish();
}

void criterion_logit_oracles() {
  Criterion c(3, "logit estimates match closed forms and an independent grid search", 10.0);

  {  // intercept only: beta = ln(ybar / (1 - ybar))
    logit::DesignData d;
    d.x = Matrix(10, 1, 1.0);
    d.y = {1, 1, 1, 0, 0, 0, 0, 0, 0, 0};
    d.names = {"Constant"};
    const auto fit = logit::fit(d);
    c.expect(std::fabs(fit.beta[0] - std::log(3.0 / 7.0)) < 1e-6, "intercept-only beta off");
  }

  {  // one binary regressor: log odds ratio of the 2x2 table
    logit::DesignData d;
    d.x = Matrix(60, 2);
    d.y.resize(60);
    for (std::size_t i = 0; i < 60; ++i) {
      const bool exposed = i >= 30;
      d.x(i, 0) = 1.0;
      d.x(i, 1) = exposed ? 1.0 : 0.0;
      // x=0: 10/30 ones; x=1: 20/30 ones
      d.y[i] = exposed ? (i < 30 + 20 ? 1.0 : 0.0) : (i < 10 ? 1.0 : 0.0);
    }
    d.names = {"Constant", "x"};
    const auto fit = logit::fit(d);
    const double or_hand = std::log((20.0 / 10.0) / (10.0 / 20.0));  // ln 4
    c.expect(std::fabs(fit.beta[1] - or_hand) < 1e-6, "odds-ratio beta off");
    c.expect(std::fabs(fit.beta[0] - std::log(10.0 / 20.0)) < 1e-6, "baseline beta off");
  }

  {  // synthetic N=500: Newton optimum vs brute-force 0.01 grid
    Rng rng(424242);
    const double b0 = -1.0, b1 = 0.8;
    logit::DesignData d;
    d.x = Matrix(500, 2);
    d.y.resize(500);
    for (std::size_t i = 0; i < 500; ++i) {
      const double x = frand(rng, -2.0, 2.0);
      d.x(i, 0) = 1.0;
      d.x(i, 1) = x;
      d.y[i] = rng.uniform() < logit::predict_prob(b0 + b1 * x) ? 1.0 : 0.0;
    }
    d.names = {"Constant", "x"};
    const auto fit = logit::fit(d);
    c.expect(fit.converged, "newton did not converge");
    c.expect(std::fabs(fit.beta[0] - b0) < 3.0 * fit.std_error[0], "b0 outside 3 SEs of truth");
    c.expect(std::fabs(fit.beta[1] - b1) < 3.0 * fit.std_error[1], "b1 outside 3 SEs of truth");

    double best0 = 0, best1 = 0, best_ll = -1e300;
    for (int i = -200; i <= 0; ++i) {
      for (int j = -20; j <= 180; ++j) {
        const std::vector<double> beta = {i * 0.01, j * 0.01};
        const double ll = logit::log_likelihood_serial(d, beta);
        if (ll > best_ll) {
          best_ll = ll;
          best0 = beta[0];
          best1 = beta[1];
        }
      }
    }
    c.expect(std::fabs(fit.beta[0] - best0) < 0.02, "grid disagrees on b0");
    c.expect(std::fabs(fit.beta[1] - best1) < 0.02, "grid disagrees on b1");
  }
  c.finish();
}

void criterion_grad_hess() {
  Criterion c(4, "analytic gradient and Hessian agree with finite differences", 5.0);
  Rng rng(99);
  for (int inst = 0; inst < 20; ++inst) {
    const std::size_t n = 60, k = 4;
    logit::DesignData d;
    d.x = Matrix(n, k);
    d.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      d.x(i, 0) = 1.0;
      for (std::size_t j = 1; j < k; ++j) d.x(i, j) = frand(rng, -2.0, 2.0);
      d.y[i] = rng.bounded(2) ? 1.0 : 0.0;
    }
    for (std::size_t j = 0; j < k; ++j) d.names.push_back("x" + std::to_string(j));
    std::vector<double> beta(k);
    for (auto& b : beta) b = frand(rng, -1.0, 1.0);

    const auto grad = logit::gradient_serial(d, beta);
    const double h = 1e-6;
    for (std::size_t j = 0; j < k; ++j) {
      auto bp = beta, bm = beta;
      bp[j] += h;
      bm[j] -= h;
      const double fd =
          (logit::log_likelihood_serial(d, bp) - logit::log_likelihood_serial(d, bm)) / (2 * h);
      const double rel = std::fabs(grad[j] - fd) / std::max(1.0, std::fabs(fd));
      c.expect(rel < 1e-6, "gradient FD mismatch at instance " + std::to_string(inst));
    }

    const auto nh = logit::neg_hessian_serial(d, beta);
    Matrix hess(k, k);
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < k; ++b) hess(a, b) = -nh(a, b);
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = a + 1; b < k; ++b)
        c.expect(hess(a, b) == hess(b, a), "hessian asymmetry");
    for (double ev : jacobi_eigenvalues(hess))
      c.expect(ev <= 1e-8, "hessian eigenvalue above tolerance");
  }
  c.finish();
}

void criterion_percentages() {
  Criterion c(5, "categorical shares render exactly at three decimals", 1.0);
  const struct { int count; const char* want; } cases[] = {
      {13061, "36.182"}, {31431, "87.071"}, {2780, "7.701"}};
  for (const auto& cs : cases) {
    std::vector<std::string> col(36098, "other");
    for (int i = 0; i < cs.count; ++i) col[static_cast<std::size_t>(i)] = "hit";
    const auto rows = report::categorical_summary(col);
    bool found = false;
    for (const auto& r : rows)
      if (r.level == "hit") found = report::fmt3(r.percentage) == cs.want;
    c.expect(found, std::string("expected ") + cs.want);
  }
  c.finish();
}

void criterion_names() {
  Criterion c(6, "name models hit the hand posterior and separate a clean name set", 10.0);

  {  // naive Bayes posterior: 3x "aa" -> F, 1x "bb" -> M, predict "a"
    std::vector<names::NameExample> train = {{"aa", "F"}, {"aa", "F"}, {"aa", "F"}, {"bb", "M"}};
    const auto model =
        names::train(train, names::Task::Gender, names::Algorithm::NaiveBayes, {}, 1);
    const auto pred = model.predict("a");
    c.expect(pred.label == "F", "posterior argmax wrong");
    c.expect(std::fabs(pred.score - 147.0 / 155.0) < 1e-9, "posterior value off");
  }

  {  // 400 separable names, pooled 10-fold CV for NB and DT
    std::vector<names::NameExample> data;
    for (int i = 0; i < 200; ++i) {
      data.push_back({std::string(2 + i % 5, 'a') + "x", "F"});
      data.push_back({std::string(2 + i % 5, 'b') + "x", "M"});
    }
    for (auto algo : {names::Algorithm::NaiveBayes, names::Algorithm::DecisionTree}) {
      const auto cv = names::cross_validate(data, 10, names::Task::Gender, algo, {}, 7);
      c.expect(cv.accuracy >= 0.95, "cv accuracy below 0.95");
      c.expect(cv.fold_scores.size() == 10, "fold count wrong");
      std::size_t total = 0;
      for (const auto& row : cv.confusion)
        for (auto v : row) total += v;
      c.expect(total == data.size(), "folds do not partition the data");
    }
  }
  c.finish();
}

void criterion_lda() {
  Criterion c(7, "topic sampler conserves counts, nails tiny oracles, separates vocabularies",
              60.0);

  {  // conservation on a 50-doc corpus across several sweep counts
    Rng rng(7);
    const std::vector<std::string> vocab = {"va", "vb", "vc", "vd", "ve", "vf", "vg", "vh"};
    std::vector<ingest::TokenizedDoc> docs(50);
    std::size_t total_tokens = 0;
    for (std::size_t i = 0; i < docs.size(); ++i) {
      docs[i].post_id = "d" + std::to_string(i);
      const std::size_t len = 4 + rng.bounded(5);
      for (std::size_t t = 0; t < len; ++t) docs[i].tokens.push_back(vocab[rng.bounded(8)]);
      total_tokens += len;
    }
    const auto corpus = lda::build_corpus(docs, 1);
    for (std::size_t iters : {1u, 2u, 5u}) {
      lda::LdaOptions opt;
      opt.topics = 3;
      opt.iterations = iters;
      opt.seed = 11;
      const auto m = lda::fit_lda(corpus, opt);
      std::size_t recount = 0;
      for (const auto& row : m.topic_word)
        for (int v : row) recount += static_cast<std::size_t>(v);
      c.expect(recount == total_tokens, "token count not conserved");
      for (std::size_t d = 0; d < corpus.docs.size(); ++d) {
        std::size_t dsum = 0;
        for (int v : m.doc_topic[d]) dsum += static_cast<std::size_t>(v);
        c.expect(dsum == corpus.docs[d].size(), "doc length not conserved");
      }
    }
  }

  {  // one-word vocabulary: phi is exactly 1
    std::vector<ingest::TokenizedDoc> docs(3);
    for (std::size_t i = 0; i < 3; ++i) {
      docs[i].post_id = "d" + std::to_string(i);
      docs[i].tokens = {"only", "only"};
    }
    const auto corpus = lda::build_corpus(docs, 1);
    lda::LdaOptions opt;
    opt.topics = 2;
    opt.iterations = 10;
    opt.seed = 3;
    const auto m = lda::fit_lda(corpus, opt);
    for (std::size_t k = 0; k < 2; ++k) c.expect(m.phi(k, 0) == 1.0, "phi not exactly one");
  }

  Rng rng(99);
  std::vector<ingest::TokenizedDoc> docs;
  const std::vector<std::string> va = {"apple", "anchor", "amber",  "arrow", "acorn", "aspen",
                                       "agate", "alder", "almond", "aster", "avens", "azure"};
  const std::vector<std::string> vb = {"basil", "bridge", "bison",  "bugle", "brick", "birch",
                                       "bog",   "basalt", "bramble", "brook", "briar", "blaze"};
  for (int i = 0; i < 60; ++i) {
    ingest::TokenizedDoc d;
    d.post_id = "p" + std::to_string(i);
    const auto& pool = i < 30 ? va : vb;
    for (int t = 0; t < 12; ++t) d.tokens.push_back(pool[rng.bounded(pool.size())]);
    docs.push_back(std::move(d));
  }
  const auto corpus = lda::build_corpus(docs, 1);

  {  // two disjoint vocabularies: top-10 purity at K=2
    lda::LdaOptions opt;
    opt.topics = 2;
    opt.alpha = 0.5;
    opt.iterations = 150;
    opt.seed = 5;
    const auto m = lda::fit_lda(corpus, opt);
    double hi = 0.0, lo = 1.0;
    for (std::size_t k = 0; k < 2; ++k) {
      const auto top = lda::top_words(m, k, 10);
      std::size_t a_hits = 0;
      for (const auto& [w, p] : top)
        if (w[0] == 'a') ++a_hits;
      const double purity = static_cast<double>(a_hits) / static_cast<double>(top.size());
      hi = std::max(hi, purity);
      lo = std::min(lo, purity);
    }
    c.expect(hi >= 0.9 && lo <= 0.1, "topics did not separate the vocabularies");
  }

  {  // model selection picks K=2 on a two-group corpus
    Rng rng2(99);
    const std::vector<std::string> sa = {"apple", "acorn", "aspen", "amber", "agate"};
    const std::vector<std::string> sb = {"basalt", "bison", "bram", "birch", "bog"};
    std::vector<ingest::TokenizedDoc> sdocs;
    for (int i = 0; i < 60; ++i) {
      ingest::TokenizedDoc d;
      d.post_id = std::to_string(i);
      const auto& pool = i < 30 ? sa : sb;
      for (int t = 0; t < 8; ++t) d.tokens.push_back(pool[rng2.bounded(pool.size())]);
      sdocs.push_back(std::move(d));
    }
    const auto scorpus = lda::build_corpus(sdocs, 1);
    lda::LdaOptions opt;
    opt.alpha = 0.5;
    opt.iterations = 120;
    opt.seed = 5;
    const auto k = lda::select_k(scorpus, {2, 3, 4, 5}, opt, 5);
    c.expect(k == 2, "select_k chose " + std::to_string(k));
  }

  {  // UMass hand value: corpus 4x{a,b} + 1x{a,c}; pair (b,a) scores log(5/4)
    std::vector<ingest::TokenizedDoc> docs2(5);
    for (std::size_t i = 0; i < 4; ++i) {
      docs2[i].post_id = "u" + std::to_string(i);
      docs2[i].tokens = {"a", "b"};
    }
    docs2[4].post_id = "u4";
    docs2[4].tokens = {"a", "c"};
    const auto corpus2 = lda::build_corpus(docs2, 1);
    const double got = lda::umass_coherence({1, 0}, corpus2);
    c.expect(std::fabs(got - std::log(5.0 / 4.0)) < 1e-12, "umass value off");
  }
  c.finish();
}

void criterion_attention() {
  Criterion c(8, "attention weights normalize, match hand softmax, and match FD Jacobian", 5.0);

  attn::HeadParams unit;
  unit.w_q = Matrix::identity(2);
  unit.w_k = Matrix::identity(2);
  unit.w_v = Matrix::identity(2);

  {  // identical keys: exactly uniform rows; singleton: exactly one
    Matrix y(3, 2);  // all-zero input -> zero scores -> uniform
    const auto w = attn::attention_weights(y, unit);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j)
        c.expect(w(i, j) == 1.0 / 3.0, "uniform case not exact");
    Matrix y1(1, 2);
    y1(0, 0) = 2.0;
    const auto w1 = attn::attention_weights(y1, unit);
    c.expect(w1(0, 0) == 1.0, "singleton weight not exactly one");
  }

  {  // hand softmax of logit difference 1: [e/(1+e), 1/(1+e)]
    Matrix s(1, 2);
    s(0, 0) = 1.0;
    const auto w = attn::softmax_rows(s);
    c.expect(std::fabs(w(0, 0) - 0.7311) < 1e-4, "softmax first weight off");
    c.expect(std::fabs(w(0, 1) - 0.2689) < 1e-4, "softmax second weight off");
  }

  Rng rng(31);
  Matrix y(4, 3);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 3; ++j) y(i, j) = frand(rng, -1.0, 1.0);
  attn::HeadParams p;
  p.w_q = Matrix(3, 2);
  p.w_k = Matrix(3, 2);
  p.w_v = Matrix(3, 2);
  for (auto* m : {&p.w_q, &p.w_k, &p.w_v})
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 2; ++j) (*m)(i, j) = frand(rng, -1.0, 1.0);

  {  // rows sum to one
    const auto w = attn::attention_weights(y, p);
    for (std::size_t i = 0; i < w.rows(); ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < w.cols(); ++j) sum += w(i, j);
      c.expect(std::fabs(sum - 1.0) <= 1e-12, "weight row does not sum to one");
    }
  }

  {  // analytic input Jacobian vs central differences
    const auto jac = attn::input_jacobian(y, p);
    const double h = 1e-5;
    double worst = 0.0;
    for (std::size_t m = 0; m < y.rows(); ++m) {
      for (std::size_t b = 0; b < y.cols(); ++b) {
        Matrix yp = y, ym = y;
        yp(m, b) += h;
        ym(m, b) -= h;
        const auto op = attn::attend(yp, p);
        const auto om = attn::attend(ym, p);
        for (std::size_t i = 0; i < op.rows(); ++i) {
          for (std::size_t cc = 0; cc < op.cols(); ++cc) {
            const double fd = (op(i, cc) - om(i, cc)) / (2 * h);
            const double an = jac(i * op.cols() + cc, m * y.cols() + b);
            worst = std::max(worst, std::fabs(an - fd) / std::max(1.0, std::fabs(fd)));
          }
        }
      }
    }
    c.expect(worst < 1e-5, "jacobian FD mismatch " + std::to_string(worst));
  }

  {  // huge logits stay finite
    Matrix big(2, 2);
    big(0, 0) = 100.0;
    big(1, 1) = -100.0;
    const auto w = attn::attention_weights(big, unit);  // scores up to 1e4
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j)
        c.expect(std::isfinite(w(i, j)), "weight not finite under huge logits");
  }
  c.finish();
}

void criterion_geo() {
  Criterion c(9, "point-in-polygon oracles, join error collection and offline remote stub", 5.0);

  auto square = [](const std::string& geoid, double x0, double x1) {
    geo::BlockGroup g;
    g.geoid = geoid;
    geo::PolygonShape p;
    p.rings = {{{x0, 0.0}, {x1, 0.0}, {x1, 1.0}, {x0, 1.0}}};
    p.min_lon = x0;
    p.max_lon = x1;
    p.min_lat = 0.0;
    p.max_lat = 1.0;
    g.polygons.push_back(p);
    return g;
  };

  {
    const std::vector<geo::BlockGroup> groups = {square("G1", 0.0, 1.0), square("G2", 2.0, 3.0)};
    const auto a = geo::locate(groups, 0.5, 0.5);
    c.expect(a.has_value() && *a == "G1", "interior point missed");
    c.expect(!geo::locate(groups, 2.0, 2.0).has_value(), "exterior point matched");
    const auto b = geo::locate(groups, 0.5, 2.5);
    c.expect(b.has_value() && *b == "G2", "second square missed");
  }

  {  // unmatched geoids are collected per post
    geo::AttributeTable t;
    t.columns = {"v"};
    t.geoids = {"G1"};
    t.rows = {{1.0}};
    t.row_of = {{"G1", 0}};
    std::vector<std::optional<std::string>> geoids = {"G1", "GHOST", std::nullopt, "GHOST"};
    const auto [fused, errors] = geo::join_attributes(geoids, t);
    c.expect(fused.size() == 4, "fused size wrong");
    c.expect(fused[0].attr_row.has_value(), "matched row lost");
    c.expect(!fused[1].attr_row.has_value(), "unmatched row joined");
    c.expect(errors.size() == 2, "expected two collected errors");
    c.expect(!errors.empty() &&
                 errors[0].message.find("unmatched block group") != std::string::npos,
             "error message wrong");
  }

  {  // remote client against injected transports; no network involved
    std::string seen_url;
    auto ok = [&](const std::string& url) {
      seen_url = url;
      return std::make_pair(200, std::string(R"({"geoid":"360610001001"})"));
    };
    const auto id = geo::fetch_geoid_remote("http://geo.test/lookup", 41.5, -81.6, ok);
    c.expect(id == "360610001001", "stub geoid wrong");
    c.expect(seen_url == "http://geo.test/lookup?lat=41.5&lon=-81.6", "url malformed: " + seen_url);

    auto fail500 = [](const std::string&) { return std::make_pair(500, std::string("boom")); };
    bool threw = false;
    try {
      geo::fetch_geoid_remote("http://geo.test/lookup", 1, 2, fail500);
    } catch (const StageError&) {
      threw = true;
    }
    c.expect(threw, "500 response not surfaced");

    auto nofield = [](const std::string&) { return std::make_pair(200, std::string("{}")); };
    threw = false;
    try {
      geo::fetch_geoid_remote("http://geo.test/lookup", 1, 2, nofield);
    } catch (const StageError&) {
      threw = true;
    }
    c.expect(threw, "missing geoid not surfaced");
  }
  c.finish();
}

void criterion_end_to_end() {
  Criterion c(10, "bundled fixture pipeline is deterministic with the reported table schema",
              120.0);
  const std::string fixture = CIVIC_FIXTURE_DIR;
  const fs::path tmp = fs::path(CIVIC_TEST_TMP_DIR) / "acceptance";
  fs::remove_all(tmp);

  auto table = config::Table::parse_file(fixture + "/config.toml");
  table.set_override("paths.out_dir", (tmp / "a").string());
  std::ostringstream log;
  const auto r1 = pipeline::run_pipeline(pipeline::load_run_config(table, fixture), log);
  table.set_override("paths.out_dir", (tmp / "b").string());
  const auto r2 = pipeline::run_pipeline(pipeline::load_run_config(table, fixture), log);

  c.expect(r1.counts.parsed >= 1900, "fixture unexpectedly small");
  c.expect(r1.fits.size() == 3, "expected three fitted models");
  for (const auto& rep : r1.fits) c.expect(rep.fit.converged, rep.model_name + " not converged");

  c.expect(r1.outputs == r2.outputs, "output file lists differ");
  for (const auto& rel : r1.outputs)
    c.expect(slurp(tmp / "a" / rel) == slurp(tmp / "b" / rel), rel + " differs between runs");

  for (const auto& rep : r1.fits) {
    const std::string csv = slurp(tmp / "a" / ("model_" + rep.model_name + ".csv"));
    c.expect(csv.rfind("variable,parameter,t_stat\n", 0) == 0, "table header wrong");
    c.expect(csv.find("Constant,") != std::string::npos, "constant row missing");
    for (const char* row : {"\nN,", "\nLL(full),", "\nLL(null),", "\nadjusted_rho_sq,"})
      c.expect(csv.find(row) != std::string::npos, std::string("summary row missing: ") + row);
  }
  c.finish();
}

}  // namespace

int main() {
  std::printf("acceptance gate\n===============\n");
  criterion_null_ll();
  criterion_rho_sq();
  criterion_logit_oracles();
  criterion_grad_hess();
  criterion_percentages();
  criterion_names();
  criterion_lda();
  criterion_attention();
  criterion_geo();
  criterion_end_to_end();
  if (g_failures == 0) {
    std::printf("\nall criteria passed\n");
    return 0;
  }
  std::printf("\n%d criteria FAILED\n", g_failures);
  return 1;
}
