#include "civic/text_classify.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "civic/common.hpp"
#include "civic/csv.hpp"
#include "civic/parallel.hpp"

namespace civic::text {

using nlohmann::json;

const std::array<std::string, 4>& category_names() {
  static const std::array<std::string, 4> names{
      "Public Transport Infrastructure", "Socioeconomic Disparity", "Accessibility", "Others"};
  return names;
}

std::vector<LabeledText> load_labeled_csv(const std::string& path) {
  auto rows = csv::parse_file(path);
  if (rows.empty()) throw ConfigError(path + ": empty file");
  if (rows[0].size() < 2 || rows[0][0] != "text" || rows[0][1] != "label")
    throw ConfigError(path + ": expected header text,label");
  std::vector<LabeledText> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() < 2)
      throw ConfigError(path + ": row " + std::to_string(r + 1) + " too short");
    int label = 0;
    try {
      label = std::stoi(rows[r][1]);
    } catch (const std::exception&) {
      throw ConfigError(path + ": row " + std::to_string(r + 1) + ": bad label '" + rows[r][1] +
                        "'");
    }
    if (label < 0 || label >= kCategories)
      throw ConfigError(path + ": row " + std::to_string(r + 1) + ": label out of range");
    out.push_back({rows[r][0], label});
  }
  return out;
}

void NaiveBayesText::rebuild_index() {
  word_id_.clear();
  for (std::size_t i = 0; i < vocabulary.size(); ++i) word_id_[vocabulary[i]] = i;
}

NaiveBayesText NaiveBayesText::train(const std::vector<LabeledText>& data,
                                     const std::set<std::string>& stopwords, std::uint64_t seed) {
  if (data.empty()) throw ConfigError("text train: no examples");
  std::array<std::size_t, 4> class_docs{};
  std::map<std::string, std::array<std::size_t, 4>> counts;
  std::array<std::size_t, 4> class_tokens{};
  for (const auto& ex : data) {
    class_docs[static_cast<std::size_t>(ex.label)]++;
    for (const auto& tok : ingest::tokenize(ingest::clean_text(ex.text), stopwords)) {
      counts[tok][static_cast<std::size_t>(ex.label)]++;
      class_tokens[static_cast<std::size_t>(ex.label)]++;
    }
  }
  for (int c = 0; c < kCategories; ++c)
    if (class_docs[static_cast<std::size_t>(c)] == 0)
      throw ConfigError("text train: category " + std::to_string(c) + " has no examples");

  NaiveBayesText m;
  m.training_seed = seed;
  for (const auto& [word, per_class] : counts) m.vocabulary.push_back(word);  // map is sorted
  const double v = static_cast<double>(m.vocabulary.size());
  if (m.vocabulary.empty()) throw ConfigError("text train: empty vocabulary after cleaning");
  for (int c = 0; c < kCategories; ++c) {
    const auto cc = static_cast<std::size_t>(c);
    m.log_prior[cc] =
        std::log(static_cast<double>(class_docs[cc]) / static_cast<double>(data.size()));
  }
  m.log_likelihood.resize(m.vocabulary.size());
  for (std::size_t w = 0; w < m.vocabulary.size(); ++w) {
    const auto& per_class = counts.at(m.vocabulary[w]);
    for (int c = 0; c < kCategories; ++c) {
      const auto cc = static_cast<std::size_t>(c);
      m.log_likelihood[w][cc] = std::log(
          (static_cast<double>(per_class[cc]) + 1.0) / (static_cast<double>(class_tokens[cc]) + v));
    }
  }
  m.rebuild_index();
  return m;
}

int NaiveBayesText::classify_tokens(const std::vector<std::string>& tokens) const {
  std::array<double, 4> score = log_prior;
  for (const auto& tok : tokens) {
    auto it = word_id_.find(tok);
    if (it == word_id_.end()) continue;  // out-of-vocabulary tokens carry no signal
    for (int c = 0; c < kCategories; ++c)
      score[static_cast<std::size_t>(c)] += log_likelihood[it->second][static_cast<std::size_t>(c)];
  }
  int best = 0;
  for (int c = 1; c < kCategories; ++c)
    if (score[static_cast<std::size_t>(c)] > score[static_cast<std::size_t>(best)]) best = c;
  return best;
}

json NaiveBayesText::to_json() const {
  json j;
  j["format_version"] = 1;
  j["task"] = "text_category";
  j["algorithm"] = algorithm();
  j["labels"] = category_names();
  j["seed"] = training_seed;
  j["parameters"] = {{"vocabulary", vocabulary},
                     {"log_prior", log_prior},
                     {"log_likelihood", log_likelihood}};
  return j;
}

NaiveBayesText NaiveBayesText::from_json(const json& j) {
  if (j.at("format_version").get<int>() != 1)
    throw ConfigError("text model: unsupported format version");
  if (j.at("task").get<std::string>() != "text_category")
    throw ConfigError("text model: wrong task");
  NaiveBayesText m;
  m.training_seed = j.at("seed").get<std::uint64_t>();
  const auto& p = j.at("parameters");
  m.vocabulary = p.at("vocabulary").get<std::vector<std::string>>();
  m.log_prior = p.at("log_prior").get<std::array<double, 4>>();
  m.log_likelihood = p.at("log_likelihood").get<std::vector<std::array<double, 4>>>();
  if (m.log_likelihood.size() != m.vocabulary.size())
    throw ConfigError("text model: vocabulary and likelihood sizes differ");
  m.rebuild_index();
  return m;
}

void NaiveBayesText::save(const std::string& path) const {
  write_text_file(path, to_json().dump(2) + "\n");
}

NaiveBayesText NaiveBayesText::load(const std::string& path) {
  return from_json(json::parse(read_text_file(path)));
}

MetricsReport evaluate_text(const Categorizer& model, const std::vector<ingest::TokenizedDoc>& docs,
                            const std::vector<int>& truth) {
  if (docs.size() != truth.size()) throw ConfigError("evaluate: docs and labels differ in length");
  if (docs.empty()) throw ConfigError("evaluate: empty test set");
  std::vector<std::size_t> t, p;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (truth[i] < 0 || truth[i] >= kCategories)
      throw ConfigError("evaluate: label out of range");
    t.push_back(static_cast<std::size_t>(truth[i]));
    p.push_back(static_cast<std::size_t>(model.classify_tokens(docs[i].tokens)));
  }
  const auto& names = category_names();
  return compute_metrics(t, p, {names.begin(), names.end()});
}

std::vector<int> classify_batch_serial(const Categorizer& model,
                                       const std::vector<ingest::TokenizedDoc>& docs) {
  std::vector<int> out(docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) out[i] = model.classify_tokens(docs[i].tokens);
  return out;
}

std::vector<int> classify_batch(const Categorizer& model,
                                const std::vector<ingest::TokenizedDoc>& docs) {
  std::vector<int> out(docs.size());
  par::parallel_for(docs.size(), [&](std::size_t i) { out[i] = model.classify_tokens(docs[i].tokens); });
  return out;
}

std::string to_string(Sentiment s) {
  switch (s) {
    case Sentiment::Negative: return "negative";
    case Sentiment::Neutral: return "neutral";
    case Sentiment::Positive: return "positive";
  }
  return "?";
}

std::unordered_map<std::string, int> load_lexicon_csv(const std::string& path) {
  auto rows = csv::parse_file(path);
  if (rows.empty()) throw ConfigError(path + ": empty file");
  if (rows[0].size() < 2 || rows[0][0] != "word" || rows[0][1] != "polarity")
    throw ConfigError(path + ": expected header word,polarity");
  std::unordered_map<std::string, int> lex;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() < 2)
      throw ConfigError(path + ": row " + std::to_string(r + 1) + " too short");
    int polarity = 0;
    try {
      polarity = std::stoi(rows[r][1]);
    } catch (const std::exception&) {
      throw ConfigError(path + ": row " + std::to_string(r + 1) + ": bad polarity");
    }
    if (!lex.emplace(rows[r][0], polarity).second)
      throw ConfigError(path + ": duplicate word '" + rows[r][0] + "'");
  }
  return lex;
}

int sentiment_score(const std::vector<std::string>& tokens,
                    const std::unordered_map<std::string, int>& lexicon) {
  int score = 0;
  for (const auto& tok : tokens) {
    auto it = lexicon.find(tok);
    if (it != lexicon.end()) score += it->second;
  }
  return score;
}

Sentiment sentiment_of(int score) {
  if (score > 0) return Sentiment::Positive;
  if (score < 0) return Sentiment::Negative;
  return Sentiment::Neutral;
}

std::vector<int> sentiment_batch_serial(const std::vector<ingest::TokenizedDoc>& docs,
                                        const std::unordered_map<std::string, int>& lexicon) {
  std::vector<int> out(docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) out[i] = sentiment_score(docs[i].tokens, lexicon);
  return out;
}

std::vector<int> sentiment_batch(const std::vector<ingest::TokenizedDoc>& docs,
                                 const std::unordered_map<std::string, int>& lexicon) {
  std::vector<int> out(docs.size());
  par::parallel_for(docs.size(),
                    [&](std::size_t i) { out[i] = sentiment_score(docs[i].tokens, lexicon); });
  return out;
}

}  // namespace civic::text
