// Benchmark comparing the serial reference kernels against their OpenMP
// counterparts. Every pair is also checked for bit-identical output, which is
// the property the test suite relies on when it validates only the serial
// side with hand oracles.
#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "civic/geo.hpp"
#include "civic/ingest.hpp"
#include "civic/logit.hpp"
#include "civic/matrix.hpp"
#include "civic/name_model.hpp"
#include "civic/parallel.hpp"
#include "civic/rng.hpp"

using namespace civic;

namespace {

double now_s() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

template <class Fn>
double time_best(int reps, Fn&& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const double t0 = now_s();
    fn();
    best = std::min(best, now_s() - t0);
  }
  return best;
}

void report_row(const std::string& name, double serial_s, double parallel_s, bool identical) {
  std::printf("%-28s %10.2f ms %10.2f ms %8.2fx   %s\n", name.c_str(), serial_s * 1e3,
              parallel_s * 1e3, serial_s / parallel_s, identical ? "identical" : "DIFFERS");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"serial vs OpenMP kernel benchmark"};
  std::size_t rows = 200000;
  std::size_t cols = 8;
  int reps = 5;
  app.add_option("--rows", rows, "observations / points per kernel");
  app.add_option("--cols", cols, "design columns");
  app.add_option("--reps", reps, "repetitions (best time wins)");
  CLI11_PARSE(app, argc, argv);

  std::printf("threads: %d\n", par::thread_count());
  std::printf("%-28s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

  Rng rng(2024);

  {  // logit likelihood, gradient, neg-Hessian
    logit::DesignData d;
    d.x = Matrix(rows, cols);
    d.y.resize(rows);
    for (std::size_t i = 0; i < rows; ++i) {
      d.x(i, 0) = 1.0;
      for (std::size_t j = 1; j < cols; ++j) d.x(i, j) = 2.0 * rng.uniform() - 1.0;
      d.y[i] = rng.bounded(2) ? 1.0 : 0.0;
    }
    for (std::size_t j = 0; j < cols; ++j) d.names.push_back("x" + std::to_string(j));
    std::vector<double> beta(cols, 0.1);

    double ll_s = 0, ll_p = 0;
    const double t1 = time_best(reps, [&] { ll_s = logit::log_likelihood_serial(d, beta); });
    const double t2 = time_best(reps, [&] { ll_p = logit::log_likelihood(d, beta); });
    report_row("logit log-likelihood", t1, t2, ll_s == ll_p);

    std::vector<double> g_s, g_p;
    const double t3 = time_best(reps, [&] { g_s = logit::gradient_serial(d, beta); });
    const double t4 = time_best(reps, [&] { g_p = logit::gradient(d, beta); });
    report_row("logit gradient", t3, t4, g_s == g_p);

    Matrix h_s, h_p;
    const double t5 = time_best(reps, [&] { h_s = logit::neg_hessian_serial(d, beta); });
    const double t6 = time_best(reps, [&] { h_p = logit::neg_hessian(d, beta); });
    report_row("logit neg-Hessian", t5, t6, h_s == h_p);
  }

  {  // dense matmul
    const std::size_t n = 300;
    Matrix a(n, n), b(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        a(i, j) = rng.uniform();
        b(i, j) = rng.uniform();
      }
    Matrix c_s, c_p;
    const double t1 = time_best(reps, [&] { c_s = matmul_serial(a, b); });
    const double t2 = time_best(reps, [&] { c_p = matmul(a, b); });
    report_row("matmul 300x300", t1, t2, c_s == c_p);
  }

  {  // point-in-polygon batch over a 10x10 grid of squares
    std::vector<geo::BlockGroup> groups;
    for (int gy = 0; gy < 10; ++gy)
      for (int gx = 0; gx < 10; ++gx) {
        geo::BlockGroup g;
        g.geoid = "G" + std::to_string(gy * 10 + gx);
        geo::PolygonShape p;
        const double x0 = gx, y0 = gy;
        p.rings = {{{x0, y0}, {x0 + 0.9, y0}, {x0 + 0.9, y0 + 0.9}, {x0, y0 + 0.9}}};
        p.min_lon = x0;
        p.max_lon = x0 + 0.9;
        p.min_lat = y0;
        p.max_lat = y0 + 0.9;
        g.polygons.push_back(p);
        groups.push_back(g);
      }
    std::vector<ingest::PostRecord> pts(rows);
    for (auto& pt : pts) {
      pt.latitude = 10.0 * rng.uniform();
      pt.longitude = 10.0 * rng.uniform();
    }
    std::vector<std::optional<std::string>> r_s, r_p;
    const double t1 = time_best(reps, [&] { r_s = geo::locate_batch_serial(groups, pts); });
    const double t2 = time_best(reps, [&] { r_p = geo::locate_batch(groups, pts); });
    report_row("point-in-polygon batch", t1, t2, r_s == r_p);
  }

  {  // name model batch prediction
    std::vector<names::NameExample> train;
    for (int i = 0; i < 200; ++i) {
      train.push_back({std::string(2 + i % 5, 'a') + "x", "F"});
      train.push_back({std::string(2 + i % 5, 'b') + "x", "M"});
    }
    const auto model = names::train(train, names::Task::Gender,
                                    names::Algorithm::NaiveBayes, {}, 1);
    std::vector<std::string> batch(rows / 4);
    for (auto& s : batch) {
      s.clear();
      const std::size_t len = 3 + rng.bounded(6);
      for (std::size_t j = 0; j < len; ++j)
        s.push_back(static_cast<char>('a' + rng.bounded(26)));
    }
    std::vector<names::Prediction> p_s, p_p;
    const double t1 = time_best(reps, [&] { p_s = names::predict_batch_serial(model, batch); });
    const double t2 = time_best(reps, [&] { p_p = names::predict_batch(model, batch); });
    bool same = p_s.size() == p_p.size();
    for (std::size_t i = 0; same && i < p_s.size(); ++i)
      same = p_s[i].label == p_p[i].label && p_s[i].score == p_p[i].score;
    report_row("name prediction batch", t1, t2, same);
  }

  return 0;
}
