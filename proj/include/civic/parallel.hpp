#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace civic::par {

// Reductions are summed chunk by chunk in a fixed order. Chunk boundaries
// depend only on the data size, so serial and parallel variants produce
// bit-identical results for any thread count.
inline constexpr std::size_t kChunk = 1024;

inline std::size_t chunk_count(std::size_t n) { return (n + kChunk - 1) / kChunk; }

template <class ChunkFn>
void for_each_chunk_serial(std::size_t n, ChunkFn&& fn) {
  const std::size_t chunks = chunk_count(n);
  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t lo = c * kChunk;
    const std::size_t hi = std::min(n, lo + kChunk);
    fn(c, lo, hi);
  }
}

template <class ChunkFn>
void for_each_chunk_parallel(std::size_t n, ChunkFn&& fn) {
  const long chunks = static_cast<long>(chunk_count(n));
#pragma omp parallel for schedule(static)
  for (long c = 0; c < chunks; ++c) {
    const std::size_t lo = static_cast<std::size_t>(c) * kChunk;
    const std::size_t hi = std::min(n, lo + kChunk);
    fn(static_cast<std::size_t>(c), lo, hi);
  }
}

// Element-wise map; each index writes only its own slot.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
#pragma omp parallel for schedule(static)
  for (long i = 0; i < static_cast<long>(n); ++i) fn(static_cast<std::size_t>(i));
}

template <class TermFn>
double chunked_sum_serial(std::size_t n, TermFn&& term) {
  double total = 0.0;
  for_each_chunk_serial(n, [&](std::size_t, std::size_t lo, std::size_t hi) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += term(i);
    total += s;
  });
  return total;
}

template <class TermFn>
double chunked_sum_parallel(std::size_t n, TermFn&& term) {
  std::vector<double> partial(chunk_count(n), 0.0);
  for_each_chunk_parallel(n, [&](std::size_t c, std::size_t lo, std::size_t hi) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += term(i);
    partial[c] = s;
  });
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

// Vector-valued version: term(i, out) adds row i's contribution into out[0..dim).
template <class TermFn>
std::vector<double> chunked_vsum_serial(std::size_t n, std::size_t dim, TermFn&& term) {
  std::vector<double> total(dim, 0.0);
  std::vector<double> s(dim);
  for_each_chunk_serial(n, [&](std::size_t, std::size_t lo, std::size_t hi) {
    std::fill(s.begin(), s.end(), 0.0);
    for (std::size_t i = lo; i < hi; ++i) term(i, s.data());
    for (std::size_t j = 0; j < dim; ++j) total[j] += s[j];
  });
  return total;
}

template <class TermFn>
std::vector<double> chunked_vsum_parallel(std::size_t n, std::size_t dim, TermFn&& term) {
  const std::size_t chunks = chunk_count(n);
  std::vector<double> partial(chunks * dim, 0.0);
  for_each_chunk_parallel(n, [&](std::size_t c, std::size_t lo, std::size_t hi) {
    double* s = partial.data() + c * dim;
    for (std::size_t i = lo; i < hi; ++i) term(i, s);
  });
  std::vector<double> total(dim, 0.0);
  for (std::size_t c = 0; c < chunks; ++c)
    for (std::size_t j = 0; j < dim; ++j) total[j] += partial[c * dim + j];
  return total;
}

inline int thread_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline double wtime() {
#ifdef _OPENMP
  return omp_get_wtime();
#else
  return 0.0;
#endif
}

}  // namespace civic::par
