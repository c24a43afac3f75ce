#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "civic/ingest.hpp"
#include "civic/matrix.hpp"

namespace civic::lda {

struct Corpus {
  std::vector<std::string> vocabulary;  // sorted; defines word ids
  std::vector<std::vector<int>> docs;   // token streams as word ids
  std::vector<std::string> doc_ids;     // parallel to docs
};

// Words kept only when they appear in at least `min_doc_freq` documents
// (clamped to 1). Documents left empty after pruning are dropped.
Corpus build_corpus(const std::vector<ingest::TokenizedDoc>& docs, std::size_t min_doc_freq);

struct LdaOptions {
  std::size_t topics = 10;
  double alpha = 0.0;  // 0 means the 50/K default
  double beta = 0.01;
  std::size_t iterations = 200;
  std::uint64_t seed = 1;
};

struct LdaModel {
  std::size_t topics = 0;
  double alpha = 0.0;
  double beta = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::string> vocabulary;
  Matrix phi;    // topics x V, rows sum to one
  Matrix theta;  // docs x topics, rows sum to one

  // final-sweep counts, kept for invariant checks
  std::vector<std::vector<int>> topic_word;  // n_kw
  std::vector<int> topic_total;              // n_k
  std::vector<std::vector<int>> doc_topic;   // n_dk
};

// Collapsed Gibbs sampler, one sequential chain; the returned distributions
// are point estimates from the final sweep.
LdaModel fit_lda(const Corpus& corpus, const LdaOptions& opt);

// Top words by probability; exact ties break toward the smaller word id, and
// n is truncated to the vocabulary size.
std::vector<std::pair<std::string, double>> top_words(const LdaModel& m, std::size_t topic,
                                                      std::size_t n);

// UMass coherence of a ranked word list: sum over pairs (i > j) of
// log((D(w_i, w_j) + 1) / D(w_j)), with D counting documents in `corpus`.
double umass_coherence(const std::vector<int>& ranked_word_ids, const Corpus& corpus);

// Mean UMass coherence over all topics, using each topic's top_n words.
double mean_coherence(const LdaModel& m, const Corpus& corpus, std::size_t top_n);

// Fits one model per candidate K and returns the K with the highest mean
// coherence; ties go to the smallest K.
std::size_t select_k(const Corpus& corpus, const std::vector<std::size_t>& candidates,
                     const LdaOptions& base, std::size_t top_n);

nlohmann::json model_to_json(const LdaModel& m);
std::string top_words_csv(const LdaModel& m, std::size_t top_n);

}  // namespace civic::lda
