#include "civic/lda.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "civic/common.hpp"
#include "civic/csv.hpp"
#include "civic/rng.hpp"

namespace civic::lda {

Corpus build_corpus(const std::vector<ingest::TokenizedDoc>& docs, std::size_t min_doc_freq) {
  if (min_doc_freq == 0) min_doc_freq = 1;
  std::map<std::string, std::size_t> doc_freq;
  for (const auto& d : docs) {
    std::set<std::string> uniq(d.tokens.begin(), d.tokens.end());
    for (const auto& w : uniq) doc_freq[w]++;
  }
  Corpus c;
  std::map<std::string, int> id_of;
  for (const auto& [word, freq] : doc_freq) {
    if (freq >= min_doc_freq) {
      id_of[word] = static_cast<int>(c.vocabulary.size());
      c.vocabulary.push_back(word);
    }
  }
  for (const auto& d : docs) {
    std::vector<int> ids;
    for (const auto& w : d.tokens) {
      auto it = id_of.find(w);
      if (it != id_of.end()) ids.push_back(it->second);
    }
    if (!ids.empty()) {
      c.docs.push_back(std::move(ids));
      c.doc_ids.push_back(d.post_id);
    }
  }
  return c;
}

LdaModel fit_lda(const Corpus& corpus, const LdaOptions& opt) {
  const std::size_t K = opt.topics;
  const std::size_t D = corpus.docs.size();
  const std::size_t V = corpus.vocabulary.size();
  if (K == 0) throw ConfigError("lda: need at least one topic");
  if (D == 0 || V == 0) throw ConfigError("lda: empty corpus");
  const double alpha = opt.alpha > 0.0 ? opt.alpha : 50.0 / static_cast<double>(K);
  const double beta = opt.beta;
  if (beta <= 0.0) throw ConfigError("lda: beta must be positive");

  LdaModel m;
  m.topics = K;
  m.alpha = alpha;
  m.beta = beta;
  m.seed = opt.seed;
  m.vocabulary = corpus.vocabulary;
  m.topic_word.assign(K, std::vector<int>(V, 0));
  m.topic_total.assign(K, 0);
  m.doc_topic.assign(D, std::vector<int>(K, 0));

  std::vector<std::vector<int>> z(D);
  Rng rng(opt.seed);
  for (std::size_t d = 0; d < D; ++d) {
    z[d].resize(corpus.docs[d].size());
    for (std::size_t t = 0; t < z[d].size(); ++t) {
      int k = static_cast<int>(rng.bounded(K));
      z[d][t] = k;
      int w = corpus.docs[d][t];
      m.doc_topic[d][static_cast<std::size_t>(k)]++;
      m.topic_word[static_cast<std::size_t>(k)][static_cast<std::size_t>(w)]++;
      m.topic_total[static_cast<std::size_t>(k)]++;
    }
  }

  const double vbeta = static_cast<double>(V) * beta;
  std::vector<double> p(K);
  for (std::size_t iter = 0; iter < opt.iterations; ++iter) {
    for (std::size_t d = 0; d < D; ++d) {
      for (std::size_t t = 0; t < corpus.docs[d].size(); ++t) {
        const auto w = static_cast<std::size_t>(corpus.docs[d][t]);
        const auto old_k = static_cast<std::size_t>(z[d][t]);
        m.doc_topic[d][old_k]--;
        m.topic_word[old_k][w]--;
        m.topic_total[old_k]--;

        double total = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
          total += (m.doc_topic[d][k] + alpha) * (m.topic_word[k][w] + beta) /
                   (m.topic_total[k] + vbeta);
          p[k] = total;
        }
        const double u = rng.uniform() * total;
        std::size_t new_k = 0;
        while (new_k + 1 < K && p[new_k] <= u) ++new_k;

        z[d][t] = static_cast<int>(new_k);
        m.doc_topic[d][new_k]++;
        m.topic_word[new_k][w]++;
        m.topic_total[new_k]++;
      }
    }
  }

  m.phi = Matrix(K, V);
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t w = 0; w < V; ++w)
      m.phi(k, w) = (m.topic_word[k][w] + beta) / (m.topic_total[k] + vbeta);
  m.theta = Matrix(D, K);
  for (std::size_t d = 0; d < D; ++d) {
    const double nd = static_cast<double>(corpus.docs[d].size());
    for (std::size_t k = 0; k < K; ++k)
      m.theta(d, k) = (m.doc_topic[d][k] + alpha) / (nd + static_cast<double>(K) * alpha);
  }
  return m;
}

std::vector<std::pair<std::string, double>> top_words(const LdaModel& m, std::size_t topic,
                                                      std::size_t n) {
  if (topic >= m.topics) throw ConfigError("lda: topic index out of range");
  const std::size_t V = m.vocabulary.size();
  n = std::min(n, V);
  std::vector<std::size_t> ids(V);
  for (std::size_t w = 0; w < V; ++w) ids[w] = w;
  std::stable_sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) {
    if (m.phi(topic, a) != m.phi(topic, b)) return m.phi(topic, a) > m.phi(topic, b);
    return a < b;
  });
  std::vector<std::pair<std::string, double>> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back({m.vocabulary[ids[i]], m.phi(topic, ids[i])});
  return out;
}

namespace {

// document frequency D(w) and co-document frequency D(w1, w2)
struct DocFreq {
  std::vector<std::set<std::size_t>> docs_with;  // word id -> doc indices
};

DocFreq doc_freq_index(const Corpus& corpus) {
  DocFreq df;
  df.docs_with.resize(corpus.vocabulary.size());
  for (std::size_t d = 0; d < corpus.docs.size(); ++d)
    for (int w : corpus.docs[d]) df.docs_with[static_cast<std::size_t>(w)].insert(d);
  return df;
}

std::size_t co_count(const DocFreq& df, std::size_t a, std::size_t b) {
  const auto& sa = df.docs_with[a];
  const auto& sb = df.docs_with[b];
  const auto& small = sa.size() <= sb.size() ? sa : sb;
  const auto& large = sa.size() <= sb.size() ? sb : sa;
  std::size_t n = 0;
  for (std::size_t d : small) n += large.count(d);
  return n;
}

double coherence_from_index(const std::vector<int>& ranked, const DocFreq& df) {
  double total = 0.0;
  for (std::size_t i = 1; i < ranked.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const auto wi = static_cast<std::size_t>(ranked[i]);
      const auto wj = static_cast<std::size_t>(ranked[j]);
      const std::size_t dj = df.docs_with[wj].size();
      if (dj == 0) throw ConfigError("coherence: word never occurs in the corpus");
      total += std::log((static_cast<double>(co_count(df, wi, wj)) + 1.0) /
                        static_cast<double>(dj));
    }
  }
  return total;
}

}  // namespace

double umass_coherence(const std::vector<int>& ranked_word_ids, const Corpus& corpus) {
  for (int w : ranked_word_ids)
    if (w < 0 || static_cast<std::size_t>(w) >= corpus.vocabulary.size())
      throw ConfigError("coherence: word id out of range");
  return coherence_from_index(ranked_word_ids, doc_freq_index(corpus));
}

double mean_coherence(const LdaModel& m, const Corpus& corpus, std::size_t top_n) {
  if (m.vocabulary.size() != corpus.vocabulary.size())
    throw ConfigError("coherence: model and corpus vocabularies differ");
  DocFreq df = doc_freq_index(corpus);
  std::map<std::string, int> id_of;
  for (std::size_t w = 0; w < corpus.vocabulary.size(); ++w)
    id_of[corpus.vocabulary[w]] = static_cast<int>(w);
  double total = 0.0;
  for (std::size_t k = 0; k < m.topics; ++k) {
    std::vector<int> ranked;
    for (const auto& [word, prob] : top_words(m, k, top_n)) ranked.push_back(id_of.at(word));
    total += coherence_from_index(ranked, df);
  }
  return total / static_cast<double>(m.topics);
}

std::size_t select_k(const Corpus& corpus, const std::vector<std::size_t>& candidates,
                     const LdaOptions& base, std::size_t top_n) {
  if (candidates.empty()) throw ConfigError("select_k: no candidates");
  std::vector<std::size_t> order = candidates;
  std::sort(order.begin(), order.end());
  std::size_t best_k = 0;
  double best_score = 0.0;
  bool first = true;
  for (std::size_t k : order) {
    LdaOptions opt = base;
    opt.topics = k;
    LdaModel m = fit_lda(corpus, opt);
    double score = mean_coherence(m, corpus, top_n);
    if (first || score > best_score) {  // ties keep the smaller K
      best_k = k;
      best_score = score;
      first = false;
    }
  }
  return best_k;
}

nlohmann::json model_to_json(const LdaModel& m) {
  nlohmann::json j;
  j["format_version"] = 1;
  j["topics"] = m.topics;
  j["alpha"] = m.alpha;
  j["beta"] = m.beta;
  j["seed"] = m.seed;
  j["vocabulary"] = m.vocabulary;
  nlohmann::json phi = nlohmann::json::array();
  for (std::size_t k = 0; k < m.topics; ++k) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t w = 0; w < m.vocabulary.size(); ++w) row.push_back(m.phi(k, w));
    phi.push_back(row);
  }
  j["phi"] = phi;
  return j;
}

std::string top_words_csv(const LdaModel& m, std::size_t top_n) {
  std::string out = "topic,rank,word,probability\n";
  char buf[64];
  for (std::size_t k = 0; k < m.topics; ++k) {
    auto words = top_words(m, k, top_n);
    for (std::size_t r = 0; r < words.size(); ++r) {
      std::snprintf(buf, sizeof(buf), "%zu,%zu,%s,%.6f\n", k, r + 1, words[r].first.c_str(),
                    words[r].second);
      out += buf;
    }
  }
  return out;
}

}  // namespace civic::lda
