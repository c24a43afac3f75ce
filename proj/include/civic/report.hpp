#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "civic/logit.hpp"
#include "civic/text_classify.hpp"

namespace civic::report {

enum class Format { Csv, Json, Markdown };
Format format_from_string(const std::string& s);  // ConfigError on anything else

// Fixed three-decimal cell, ASCII minus, no negative zero.
std::string fmt3(double v);

struct StatRow {
  std::string variable;
  double mean = 0.0;
  double std_dev = 0.0;  // sample standard deviation, N-1 denominator
  double min = 0.0;
  double max = 0.0;
};
using StatTable = std::vector<StatRow>;

StatTable descriptive_stats(const std::vector<std::pair<std::string, std::vector<double>>>& columns);

struct LevelCount {
  std::string level;
  std::size_t count = 0;
  double percentage = 0.0;  // 100*count/N, rounded to 3 decimals
};

// Levels ordered by descending count; equal counts fall back to level name.
std::vector<LevelCount> categorical_summary(const std::vector<std::string>& column);

struct CrossTab {
  std::vector<std::string> row_labels;  // the four categories, in label order
  std::vector<std::string> col_labels;  // positive, neutral, negative
  std::vector<std::vector<std::size_t>> counts;
};

CrossTab topic_sentiment_crosstab(const std::vector<int>& categories,
                                  const std::vector<text::Sentiment>& sentiments);

struct FitReport {
  std::string model_name;
  logit::FitResult fit;
};

std::string render_stats(const StatTable& table, Format format);
std::string render_categorical(const std::string& variable, const std::vector<LevelCount>& rows,
                               Format format);
std::string render_crosstab(const CrossTab& tab, Format format);

// Coefficient rows (variable, parameter, t-stat) followed by the summary rows
// N, LL(full), LL(null) and the adjusted rho-squared. JSON keeps unrounded
// values in *_full fields next to the three-decimal ones.
std::string render_fit(const FitReport& report, Format format);

}  // namespace civic::report
