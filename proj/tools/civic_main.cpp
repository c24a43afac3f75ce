// Command-line front end: one subcommand per pipeline stage plus the
// end-to-end `pipeline` runner. Exit codes: 0 success, 1 stage failure,
// 2 configuration error.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "civic/attention.hpp"
#include "civic/common.hpp"
#include "civic/config.hpp"
#include "civic/csv.hpp"
#include "civic/geo.hpp"
#include "civic/ingest.hpp"
#include "civic/lda.hpp"
#include "civic/logit.hpp"
#include "civic/metrics.hpp"
#include "civic/name_model.hpp"
#include "civic/pipeline.hpp"
#include "civic/report.hpp"
#include "civic/text_classify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace civic;

namespace {

json metrics_json(const MetricsReport& m) {
  json per = json::array();
  for (std::size_t i = 0; i < m.per_label.size(); ++i) {
    per.push_back({{"label", m.labels[i]},
                   {"precision", m.per_label[i].precision},
                   {"recall", m.per_label[i].recall},
                   {"f1", m.per_label[i].f1}});
  }
  json j{{"accuracy", m.accuracy}, {"macro_f1", m.macro_f1()}, {"per_label", per}};
  if (!m.fold_scores.empty()) j["fold_scores"] = m.fold_scores;
  return j;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open \"" + path + "\"");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// design csv: header y,<feature names...>; the intercept column is implied
logit::DesignData load_design_csv(const std::string& path) {
  auto rows = csv::parse_file(path);
  if (rows.size() < 2) throw ConfigError("design file needs a header and data rows");
  const auto& header = rows[0];
  if (header.size() < 2 || header[0] != "y")
    throw ConfigError("design header must start with \"y\" and name at least one feature");
  logit::DesignData d;
  d.names.push_back("Constant");
  for (std::size_t j = 1; j < header.size(); ++j) d.names.push_back(header[j]);
  const std::size_t n = rows.size() - 1;
  d.x = Matrix(n, header.size());
  d.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i + 1].size() != header.size())
      throw ConfigError("design row " + std::to_string(i + 2) + " has the wrong width");
    d.y[i] = parse_double_strict(rows[i + 1][0]);
    d.x(i, 0) = 1.0;
    for (std::size_t j = 1; j < header.size(); ++j)
      d.x(i, j) = parse_double_strict(rows[i + 1][j]);
  }
  return d;
}

report::FitReport fit_report_from_json(const json& j) {
  report::FitReport rep;
  rep.model_name = j.value("model", "");
  logit::FitResult& f = rep.fit;
  for (const auto& row : j.at("rows")) {
    f.names.push_back(row.at("variable").get<std::string>());
    f.beta.push_back(row.at("parameter_full").get<double>());
    f.t_stat.push_back(row.at("t_stat_full").get<double>());
    f.std_error.push_back(row.at("std_error_full").get<double>());
  }
  f.log_lik = j.at("log_likelihood_full").get<double>();
  f.null_log_lik = j.at("null_log_likelihood_full").get<double>();
  f.adjusted_rho_sq = j.at("adjusted_rho_sq_full").get<double>();
  f.observations = j.at("observations").get<std::size_t>();
  f.iterations = j.at("iterations").get<std::size_t>();
  f.converged = j.at("converged").get<bool>();
  return rep;
}

struct Cli {
  bool as_json = false;

  // pipeline
  std::string config_path;
  std::vector<std::string> overrides;

  // shared file options
  std::string posts, stopwords_path, keywords_path, lexicon_path, train_path, model_path,
      out_path, polygons_path, attributes_path, design_path, input_path;
  std::string posts_format = "jsonl";
  std::string task = "gender", algorithm = "naive_bayes", name, text, format = "markdown";
  std::uint64_t seed = 1;
  std::size_t topics = 4, iterations = 200, min_doc_freq = 1, top_words = 10, folds = 0;
  double alpha = 0.0, beta = 0.01, test_fraction = 0.0;
  double lat = 0.0, lon = 0.0;
  names::Hyperparams hp;
};

void apply_overrides(config::Table& table, const std::vector<std::string>& sets) {
  for (const auto& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw ConfigError("--set needs key=value, got \"" + kv + "\"");
    table.set_override(kv.substr(0, eq), kv.substr(eq + 1));
  }
}

int cmd_pipeline(const Cli& c) {
  auto table = config::Table::parse_file(c.config_path);
  apply_overrides(table, c.overrides);
  const std::string base = fs::path(c.config_path).parent_path().string();
  auto cfg = pipeline::load_run_config(table, base.empty() ? "." : base);
  auto result = pipeline::run_pipeline(cfg, std::cerr);
  if (c.as_json)
    std::cout << result.manifest.dump(2) << "\n";
  else
    std::cout << "pipeline complete: " << result.counts.fused << " fused observations, "
              << result.fits.size() << " models -> " << cfg.out_dir << "\n";
  return 0;
}

int cmd_ingest(const Cli& c) {
  auto result = ingest::parse_posts(c.posts, ingest::format_from_string(c.posts_format));
  if (c.as_json) {
    json errors = json::array();
    for (const auto& e : result.errors)
      errors.push_back({{"line", e.line}, {"message", e.message}});
    std::cout << json{{"parsed", result.records.size()},
                      {"malformed", result.errors.size()},
                      {"errors", errors}}
                     .dump(2)
              << "\n";
  } else {
    std::cout << "parsed " << result.records.size() << " posts, " << result.errors.size()
              << " malformed rows\n";
    for (const auto& e : result.errors)
      std::cout << "  line " << e.line << ": " << e.message << "\n";
  }
  return 0;
}

int cmd_demo_train(const Cli& c) {
  const auto data = names::load_examples_csv(c.train_path);
  const auto task = names::task_from_string(c.task);
  const auto algo = names::algorithm_from_string(c.algorithm);
  json out{{"task", c.task}, {"algorithm", c.algorithm}, {"examples", data.size()}};

  if (c.folds > 1) {
    auto cv = names::cross_validate(data, c.folds, task, algo, c.hp, c.seed);
    out["cross_validation"] = metrics_json(cv);
  }
  std::vector<names::NameExample> train_set = data;
  if (c.test_fraction > 0.0) {
    auto [tr, te] = names::split_train_test(data, 1.0 - c.test_fraction, c.seed);
    train_set = tr;
    auto model = names::train(tr, task, algo, c.hp, c.seed);
    out["holdout"] = metrics_json(names::evaluate(model, te));
    out["holdout_size"] = te.size();
  }
  auto model = names::train(train_set, task, algo, c.hp, c.seed);
  if (!c.out_path.empty()) {
    model.save(c.out_path);
    out["model_file"] = c.out_path;
  }
  if (c.as_json) {
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "trained " << c.algorithm << " " << c.task << " model on " << data.size()
              << " examples\n";
    if (out.contains("cross_validation"))
      std::cout << "  cv accuracy: " << out["cross_validation"]["accuracy"].get<double>() << "\n";
    if (out.contains("holdout"))
      std::cout << "  holdout accuracy: " << out["holdout"]["accuracy"].get<double>() << "\n";
    if (!c.out_path.empty()) std::cout << "  saved to " << c.out_path << "\n";
  }
  return 0;
}

int cmd_demo_predict(const Cli& c) {
  const auto model = names::NameModel::load(c.model_path);
  const auto pred = model.predict(c.name);
  if (c.as_json)
    std::cout << json{{"name", c.name}, {"label", pred.label}, {"score", pred.score}}.dump(2)
              << "\n";
  else
    std::cout << c.name << " -> " << pred.label << " (score " << pred.score << ")\n";
  return 0;
}

int cmd_topics(const Cli& c) {
  auto parsed = ingest::parse_posts(c.posts, ingest::format_from_string(c.posts_format));
  const auto stopwords =
      c.stopwords_path.empty() ? std::set<std::string>{} : pipeline::load_word_set(c.stopwords_path);
  auto docs = ingest::tokenize_posts(parsed.records, stopwords);
  if (!c.keywords_path.empty()) {
    const auto keywords = pipeline::load_word_set(c.keywords_path);
    std::vector<ingest::TokenizedDoc> kept;
    for (auto& d : docs)
      if (ingest::relevance_filter(d, keywords)) kept.push_back(std::move(d));
    docs = std::move(kept);
  }
  auto corpus = lda::build_corpus(docs, c.min_doc_freq);
  if (corpus.docs.empty()) throw StageError("corpus is empty after pruning");
  lda::LdaOptions opt;
  opt.topics = c.topics;
  opt.alpha = c.alpha;
  opt.beta = c.beta;
  opt.iterations = c.iterations;
  opt.seed = c.seed;
  auto model = lda::fit_lda(corpus, opt);
  if (c.as_json) {
    json j = lda::model_to_json(model);
    j["mean_coherence"] = lda::mean_coherence(model, corpus, c.top_words);
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << lda::top_words_csv(model, c.top_words);
  }
  if (!c.out_path.empty()) {
    std::ofstream out(c.out_path, std::ios::binary);
    out << lda::top_words_csv(model, c.top_words);
  }
  return 0;
}

int cmd_classify(const Cli& c) {
  const auto labeled = text::load_labeled_csv(c.train_path);
  const auto stopwords =
      c.stopwords_path.empty() ? std::set<std::string>{} : pipeline::load_word_set(c.stopwords_path);
  const auto model = text::NaiveBayesText::train(labeled, stopwords, c.seed);
  const auto tokens = ingest::tokenize(ingest::clean_text(c.text), stopwords);
  const int label = model.classify_tokens(tokens);
  const std::string& name = text::category_names()[static_cast<std::size_t>(label)];
  if (c.as_json)
    std::cout << json{{"text", c.text}, {"category", label}, {"category_name", name}}.dump(2)
              << "\n";
  else
    std::cout << label << " " << name << "\n";
  return 0;
}

int cmd_sentiment(const Cli& c) {
  const auto lexicon = text::load_lexicon_csv(c.lexicon_path);
  const auto tokens = ingest::tokenize(ingest::clean_text(c.text), {});
  const int score = text::sentiment_score(tokens, lexicon);
  const auto label = text::to_string(text::sentiment_of(score));
  if (c.as_json)
    std::cout << json{{"text", c.text}, {"score", score}, {"sentiment", label}}.dump(2) << "\n";
  else
    std::cout << label << " (score " << score << ")\n";
  return 0;
}

int cmd_fuse(const Cli& c) {
  const auto groups = geo::load_geojson(c.polygons_path);
  std::optional<std::string> geoid;
  const char* remote = std::getenv("CIVIC_GEOCODER_URL");
  if (remote != nullptr && remote[0] != '\0') {
    try {
      geoid = geo::fetch_geoid_remote(remote, c.lat, c.lon);
    } catch (const StageError&) {
      geoid = geo::locate(groups, c.lat, c.lon);
    }
  } else {
    geoid = geo::locate(groups, c.lat, c.lon);
  }
  json j{{"lat", c.lat}, {"lon", c.lon}};
  j["geoid"] = geoid ? json(*geoid) : json(nullptr);
  if (geoid && !c.attributes_path.empty()) {
    const auto attrs = geo::load_attributes_csv(c.attributes_path);
    auto it = attrs.row_of.find(*geoid);
    if (it == attrs.row_of.end()) {
      j["attributes"] = json(nullptr);
      j["unmatched"] = true;
    } else {
      json row;
      for (std::size_t k = 0; k < attrs.columns.size(); ++k)
        row[attrs.columns[k]] = attrs.rows[it->second][k];
      j["attributes"] = row;
    }
  }
  if (c.as_json) {
    std::cout << j.dump(2) << "\n";
  } else if (geoid) {
    std::cout << *geoid << "\n";
  } else {
    std::cout << "outside all polygons\n";
  }
  return 0;
}

int cmd_fit(const Cli& c) {
  auto design = load_design_csv(c.design_path);
  report::FitReport rep;
  rep.model_name = fs::path(c.design_path).stem().string();
  rep.fit = logit::fit(design);
  const auto fmt = c.as_json ? report::Format::Json : report::format_from_string(c.format);
  std::cout << report::render_fit(rep, fmt);
  if (!c.out_path.empty()) {
    std::ofstream out(c.out_path, std::ios::binary);
    out << report::render_fit(rep, report::Format::Json);
  }
  return 0;
}

int cmd_report(const Cli& c) {
  const auto rep = fit_report_from_json(json::parse(slurp(c.model_path)));
  const auto fmt = c.as_json ? report::Format::Json : report::format_from_string(c.format);
  std::cout << report::render_fit(rep, fmt);
  return 0;
}

int cmd_attention(const Cli& c) {
  const json j = json::parse(slurp(c.input_path));
  const Matrix y = attn::matrix_from_json(j.at("y"));
  attn::HeadParams p;
  p.w_q = attn::matrix_from_json(j.at("w_q"));
  p.w_k = attn::matrix_from_json(j.at("w_k"));
  p.w_v = attn::matrix_from_json(j.at("w_v"));
  const Matrix weights = attn::attention_weights(y, p);
  const Matrix output = attend(y, p);
  if (c.as_json) {
    std::cout << json{{"weights", attn::matrix_to_json(weights)},
                      {"output", attn::matrix_to_json(output)}}
                     .dump(2)
              << "\n";
  } else {
    for (std::size_t i = 0; i < weights.rows(); ++i) {
      for (std::size_t k = 0; k < weights.cols(); ++k)
        std::cout << (k ? " " : "") << report::fmt3(weights(i, k));
      std::cout << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Cli c;
  CLI::App app{"social-post attitude modeling pipeline"};
  app.require_subcommand(1);

  auto add_json = [&](CLI::App* sub) { sub->add_flag("--json", c.as_json, "machine-readable output"); };

  auto* sp = app.add_subcommand("pipeline", "run the full pipeline from a config file");
  sp->add_option("--config", c.config_path, "TOML config")->required();
  sp->add_option("--set", c.overrides, "override config values (key=value)");
  add_json(sp);

  auto* si = app.add_subcommand("ingest", "parse and validate a post archive");
  si->add_option("--posts", c.posts, "posts file")->required();
  si->add_option("--format", c.posts_format, "jsonl or csv");
  add_json(si);

  auto* st = app.add_subcommand("demo-train", "train a name demographics model");
  st->add_option("--task", c.task, "gender or race")->required();
  st->add_option("--algorithm", c.algorithm, "naive_bayes, knn, decision_tree, bagged_trees");
  st->add_option("--train", c.train_path, "name,label csv")->required();
  st->add_option("--out", c.out_path, "model json path");
  st->add_option("--seed", c.seed, "rng seed");
  st->add_option("--test-fraction", c.test_fraction, "holdout fraction");
  st->add_option("--folds", c.folds, "cross-validation folds");
  st->add_option("--knn-k", c.hp.knn_k, "knn neighbors");
  st->add_option("--max-depth", c.hp.dt_max_depth, "tree depth cap");
  st->add_option("--min-leaf", c.hp.dt_min_leaf, "minimum leaf size");
  st->add_option("--trees", c.hp.bag_trees, "bagged tree count");
  add_json(st);

  auto* sd = app.add_subcommand("demo-predict", "classify one name with a saved model");
  sd->add_option("--model", c.model_path, "model json")->required();
  sd->add_option("--name", c.name, "name to classify")->required();
  add_json(sd);

  auto* so = app.add_subcommand("topics", "fit LDA topics over a post archive");
  so->add_option("--posts", c.posts, "posts file")->required();
  so->add_option("--format", c.posts_format, "jsonl or csv");
  so->add_option("--stopwords", c.stopwords_path, "stopword list");
  so->add_option("--keywords", c.keywords_path, "relevance keyword list");
  so->add_option("--k", c.topics, "topic count");
  so->add_option("--iterations", c.iterations, "gibbs sweeps");
  so->add_option("--alpha", c.alpha, "doc-topic prior (0 = 50/K)");
  so->add_option("--beta", c.beta, "topic-word prior");
  so->add_option("--seed", c.seed, "rng seed");
  so->add_option("--min-doc-freq", c.min_doc_freq, "vocabulary pruning threshold");
  so->add_option("--top-words", c.top_words, "words per topic in reports");
  so->add_option("--out", c.out_path, "also write top-words csv here");
  add_json(so);

  auto* sc = app.add_subcommand("classify", "assign a category to one text");
  sc->add_option("--train", c.train_path, "text,label csv")->required();
  sc->add_option("--stopwords", c.stopwords_path, "stopword list");
  sc->add_option("--text", c.text, "text to classify")->required();
  sc->add_option("--seed", c.seed, "rng seed");
  add_json(sc);

  auto* ss = app.add_subcommand("sentiment", "score one text against a lexicon");
  ss->add_option("--lexicon", c.lexicon_path, "word,polarity csv")->required();
  ss->add_option("--text", c.text, "text to score")->required();
  add_json(ss);

  auto* sf = app.add_subcommand("fuse", "locate a point in the block-group polygons");
  sf->add_option("--polygons", c.polygons_path, "geojson file")->required();
  sf->add_option("--attributes", c.attributes_path, "attribute csv (optional)");
  sf->add_option("--lat", c.lat, "latitude")->required();
  sf->add_option("--lon", c.lon, "longitude")->required();
  add_json(sf);

  auto* sg = app.add_subcommand("fit", "fit a binary logit from a design csv");
  sg->add_option("--design", c.design_path, "csv with header y,<features...>")->required();
  sg->add_option("--format", c.format, "csv, json or markdown");
  sg->add_option("--out", c.out_path, "also write the json report here");
  add_json(sg);

  auto* sr = app.add_subcommand("report", "re-render a saved model report");
  sr->add_option("--model", c.model_path, "model json from fit/pipeline")->required();
  sr->add_option("--format", c.format, "csv, json or markdown");
  add_json(sr);

  auto* sa = app.add_subcommand("attention", "attention weights for a json-encoded input");
  sa->add_option("--input", c.input_path, "json with y, w_q, w_k, w_v")->required();
  add_json(sa);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sp->parsed()) return cmd_pipeline(c);
    if (si->parsed()) return cmd_ingest(c);
    if (st->parsed()) return cmd_demo_train(c);
    if (sd->parsed()) return cmd_demo_predict(c);
    if (so->parsed()) return cmd_topics(c);
    if (sc->parsed()) return cmd_classify(c);
    if (ss->parsed()) return cmd_sentiment(c);
    if (sf->parsed()) return cmd_fuse(c);
    if (sg->parsed()) return cmd_fit(c);
    if (sr->parsed()) return cmd_report(c);
    if (sa->parsed()) return cmd_attention(c);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const StageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
