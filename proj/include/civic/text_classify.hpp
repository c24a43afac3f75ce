#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "civic/ingest.hpp"
#include "civic/metrics.hpp"

namespace civic::text {

inline constexpr int kCategories = 4;

// Category display names, indexed by label.
const std::array<std::string, 4>& category_names();

struct LabeledText {
  std::string text;
  int label = 0;  // 0..3
};

// header: text,label
std::vector<LabeledText> load_labeled_csv(const std::string& path);

// Assigns one of the four category labels to a tokenized document.
class Categorizer {
 public:
  virtual ~Categorizer() = default;
  virtual int classify_tokens(const std::vector<std::string>& tokens) const = 0;
  virtual std::string algorithm() const = 0;
};

// Multinomial naive Bayes over unigram counts, Laplace-smoothed with alpha=1.
// Tokens outside the training vocabulary are ignored; score ties resolve to
// the smallest label.
class NaiveBayesText : public Categorizer {
 public:
  int classify_tokens(const std::vector<std::string>& tokens) const override;
  std::string algorithm() const override { return "naive_bayes"; }

  // Every category 0..3 must appear in the training data.
  static NaiveBayesText train(const std::vector<LabeledText>& data,
                              const std::set<std::string>& stopwords, std::uint64_t seed);

  nlohmann::json to_json() const;
  static NaiveBayesText from_json(const nlohmann::json& j);
  void save(const std::string& path) const;
  static NaiveBayesText load(const std::string& path);

  std::uint64_t training_seed = 0;
  std::vector<std::string> vocabulary;               // sorted
  std::array<double, 4> log_prior{};                 // per category
  std::vector<std::array<double, 4>> log_likelihood;  // per word, per category

 private:
  std::unordered_map<std::string, std::size_t> word_id_;
  void rebuild_index();
};

// Confusion over the four categories; `truth` labels must be 0..3.
MetricsReport evaluate_text(const Categorizer& model,
                            const std::vector<ingest::TokenizedDoc>& docs,
                            const std::vector<int>& truth);

std::vector<int> classify_batch_serial(const Categorizer& model,
                                       const std::vector<ingest::TokenizedDoc>& docs);
std::vector<int> classify_batch(const Categorizer& model,
                                const std::vector<ingest::TokenizedDoc>& docs);

// ---------------------------------------------------------------------------
// lexicon sentiment

enum class Sentiment { Negative, Neutral, Positive };
std::string to_string(Sentiment s);

// header: word,polarity (signed integer); duplicate words are an error.
std::unordered_map<std::string, int> load_lexicon_csv(const std::string& path);

// Sum of polarities over tokens found in the lexicon.
int sentiment_score(const std::vector<std::string>& tokens,
                    const std::unordered_map<std::string, int>& lexicon);

// positive when the score is > 0, negative when < 0, else neutral
Sentiment sentiment_of(int score);

std::vector<int> sentiment_batch_serial(const std::vector<ingest::TokenizedDoc>& docs,
                                        const std::unordered_map<std::string, int>& lexicon);
std::vector<int> sentiment_batch(const std::vector<ingest::TokenizedDoc>& docs,
                                 const std::unordered_map<std::string, int>& lexicon);

}  // namespace civic::text
