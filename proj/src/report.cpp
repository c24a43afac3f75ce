#include "civic/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include <nlohmann/json.hpp>

#include "civic/common.hpp"
#include "civic/csv.hpp"

namespace civic::report {

namespace {

using nlohmann::json;

double round3(double v) { return std::round(v * 1000.0) / 1000.0; }

json stats_json(const StatTable& table) {
  json rows = json::array();
  for (const auto& r : table) {
    rows.push_back({{"variable", r.variable},
                    {"mean", round3(r.mean)},
                    {"std_dev", round3(r.std_dev)},
                    {"min", round3(r.min)},
                    {"max", round3(r.max)},
                    {"mean_full", r.mean},
                    {"std_dev_full", r.std_dev}});
  }
  return json{{"rows", rows}};
}

std::string md_row(const std::vector<std::string>& cells) {
  std::string out = "|";
  for (const auto& c : cells) out += " " + c + " |";
  out += "\n";
  return out;
}

std::string md_rule(std::size_t n) {
  std::string out = "|";
  for (std::size_t i = 0; i < n; ++i) out += " --- |";
  out += "\n";
  return out;
}

}  // namespace

Format format_from_string(const std::string& s) {
  if (s == "csv") return Format::Csv;
  if (s == "json") return Format::Json;
  if (s == "markdown" || s == "md") return Format::Markdown;
  throw ConfigError("unknown report format \"" + s + "\"");
}

std::string fmt3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  std::string s(buf);
  if (s == "-0.000") s = "0.000";
  return s;
}

StatTable descriptive_stats(const std::vector<std::pair<std::string, std::vector<double>>>& columns) {
  StatTable table;
  table.reserve(columns.size());
  for (const auto& [name, values] : columns) {
    if (values.empty()) throw ConfigError("descriptive_stats: column \"" + name + "\" is empty");
    StatRow row;
    row.variable = name;
    double sum = 0.0;
    row.min = values.front();
    row.max = values.front();
    for (double v : values) {
      sum += v;
      row.min = std::min(row.min, v);
      row.max = std::max(row.max, v);
    }
    row.mean = sum / static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) {
      const double d = v - row.mean;
      ss += d * d;
    }
    row.std_dev = values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size() - 1)) : 0.0;
    table.push_back(std::move(row));
  }
  return table;
}

std::vector<LevelCount> categorical_summary(const std::vector<std::string>& column) {
  if (column.empty()) throw ConfigError("categorical_summary: column is empty");
  std::map<std::string, std::size_t> counts;
  for (const auto& v : column) ++counts[v];
  std::vector<LevelCount> out;
  out.reserve(counts.size());
  const double n = static_cast<double>(column.size());
  for (const auto& [level, count] : counts) {
    LevelCount lc;
    lc.level = level;
    lc.count = count;
    lc.percentage = round3(100.0 * static_cast<double>(count) / n);
    out.push_back(std::move(lc));
  }
  std::sort(out.begin(), out.end(), [](const LevelCount& a, const LevelCount& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.level < b.level;
  });
  return out;
}

CrossTab topic_sentiment_crosstab(const std::vector<int>& categories,
                                  const std::vector<text::Sentiment>& sentiments) {
  if (categories.size() != sentiments.size())
    throw ConfigError("crosstab: category and sentiment lengths differ");
  CrossTab tab;
  const auto& names = text::category_names();
  tab.row_labels.assign(names.begin(), names.end());
  tab.col_labels = {"positive", "neutral", "negative"};
  tab.counts.assign(names.size(), std::vector<std::size_t>(3, 0));
  for (std::size_t i = 0; i < categories.size(); ++i) {
    const int c = categories[i];
    if (c < 0 || c >= static_cast<int>(names.size()))
      throw ConfigError("crosstab: category index out of range");
    std::size_t col = 0;
    switch (sentiments[i]) {
      case text::Sentiment::Positive: col = 0; break;
      case text::Sentiment::Neutral: col = 1; break;
      case text::Sentiment::Negative: col = 2; break;
    }
    ++tab.counts[static_cast<std::size_t>(c)][col];
  }
  return tab;
}

std::string render_stats(const StatTable& table, Format format) {
  switch (format) {
    case Format::Csv: {
      std::string out = "variable,mean,std_dev,min,max\n";
      for (const auto& r : table) {
        out += csv::join_row({r.variable, fmt3(r.mean), fmt3(r.std_dev), fmt3(r.min), fmt3(r.max)});
        out += "\n";
      }
      return out;
    }
    case Format::Json:
      return stats_json(table).dump(2) + "\n";
    case Format::Markdown: {
      std::string out = md_row({"Variable", "Mean", "Std. dev.", "Min", "Max"});
      out += md_rule(5);
      for (const auto& r : table)
        out += md_row({r.variable, fmt3(r.mean), fmt3(r.std_dev), fmt3(r.min), fmt3(r.max)});
      return out;
    }
  }
  throw ConfigError("unknown report format");
}

std::string render_categorical(const std::string& variable, const std::vector<LevelCount>& rows,
                               Format format) {
  switch (format) {
    case Format::Csv: {
      std::string out = "variable,level,count,percentage\n";
      for (const auto& r : rows) {
        out += csv::join_row(
            {variable, r.level, std::to_string(r.count), fmt3(r.percentage)});
        out += "\n";
      }
      return out;
    }
    case Format::Json: {
      json jrows = json::array();
      for (const auto& r : rows)
        jrows.push_back({{"level", r.level}, {"count", r.count}, {"percentage", r.percentage}});
      return json{{"variable", variable}, {"levels", jrows}}.dump(2) + "\n";
    }
    case Format::Markdown: {
      std::string out = md_row({variable, "Count", "Percentage"});
      out += md_rule(3);
      for (const auto& r : rows)
        out += md_row({r.level, std::to_string(r.count), fmt3(r.percentage)});
      return out;
    }
  }
  throw ConfigError("unknown report format");
}

std::string render_crosstab(const CrossTab& tab, Format format) {
  switch (format) {
    case Format::Csv: {
      std::string out = "category";
      for (const auto& c : tab.col_labels) out += "," + csv::escape(c);
      out += "\n";
      for (std::size_t i = 0; i < tab.row_labels.size(); ++i) {
        out += csv::escape(tab.row_labels[i]);
        for (std::size_t j = 0; j < tab.col_labels.size(); ++j)
          out += "," + std::to_string(tab.counts[i][j]);
        out += "\n";
      }
      return out;
    }
    case Format::Json: {
      json jcounts = json::array();
      for (const auto& row : tab.counts) jcounts.push_back(row);
      return json{{"row_labels", tab.row_labels},
                  {"col_labels", tab.col_labels},
                  {"counts", jcounts}}
                 .dump(2) +
             "\n";
    }
    case Format::Markdown: {
      std::vector<std::string> head = {"Category"};
      head.insert(head.end(), tab.col_labels.begin(), tab.col_labels.end());
      std::string out = md_row(head);
      out += md_rule(head.size());
      for (std::size_t i = 0; i < tab.row_labels.size(); ++i) {
        std::vector<std::string> cells = {tab.row_labels[i]};
        for (std::size_t j = 0; j < tab.col_labels.size(); ++j)
          cells.push_back(std::to_string(tab.counts[i][j]));
        out += md_row(cells);
      }
      return out;
    }
  }
  throw ConfigError("unknown report format");
}

std::string render_fit(const FitReport& report, Format format) {
  const auto& fit = report.fit;
  switch (format) {
    case Format::Csv: {
      std::string out = "variable,parameter,t_stat\n";
      for (std::size_t i = 0; i < fit.beta.size(); ++i) {
        out += csv::join_row({fit.names[i], fmt3(fit.beta[i]), fmt3(fit.t_stat[i])});
        out += "\n";
      }
      out += csv::join_row({"N", std::to_string(fit.observations), ""}) + "\n";
      out += csv::join_row({"LL(full)", fmt3(fit.log_lik), ""}) + "\n";
      out += csv::join_row({"LL(null)", fmt3(fit.null_log_lik), ""}) + "\n";
      out += csv::join_row({"adjusted_rho_sq", fmt3(fit.adjusted_rho_sq), ""}) + "\n";
      return out;
    }
    case Format::Json: {
      json rows = json::array();
      for (std::size_t i = 0; i < fit.beta.size(); ++i) {
        rows.push_back({{"variable", fit.names[i]},
                        {"parameter", round3(fit.beta[i])},
                        {"t_stat", round3(fit.t_stat[i])},
                        {"parameter_full", fit.beta[i]},
                        {"t_stat_full", fit.t_stat[i]},
                        {"std_error_full", fit.std_error[i]}});
      }
      json j{{"model", report.model_name},
             {"rows", rows},
             {"observations", fit.observations},
             {"log_likelihood", round3(fit.log_lik)},
             {"log_likelihood_full", fit.log_lik},
             {"null_log_likelihood", round3(fit.null_log_lik)},
             {"null_log_likelihood_full", fit.null_log_lik},
             {"adjusted_rho_sq", round3(fit.adjusted_rho_sq)},
             {"adjusted_rho_sq_full", fit.adjusted_rho_sq},
             {"converged", fit.converged},
             {"iterations", fit.iterations}};
      return j.dump(2) + "\n";
    }
    case Format::Markdown: {
      std::string out;
      if (!report.model_name.empty()) out += "## Model: " + report.model_name + "\n\n";
      out += md_row({"Variable", "Parameter", "t-stat"});
      out += md_rule(3);
      for (std::size_t i = 0; i < fit.beta.size(); ++i)
        out += md_row({fit.names[i], fmt3(fit.beta[i]), fmt3(fit.t_stat[i])});
      out += md_row({"N", std::to_string(fit.observations), ""});
      out += md_row({"LL(full)", fmt3(fit.log_lik), ""});
      out += md_row({"LL(null)", fmt3(fit.null_log_lik), ""});
      out += md_row({"Adjusted rho-squared", fmt3(fit.adjusted_rho_sq), ""});
      return out;
    }
  }
  throw ConfigError("unknown report format");
}

}  // namespace civic::report
