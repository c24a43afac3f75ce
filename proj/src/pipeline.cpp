#include "civic/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "civic/common.hpp"
#include "civic/csv.hpp"
#include "civic/lda.hpp"

namespace civic::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

const std::set<std::string>& dummy_levels() {
  static const std::set<std::string> levels = {"female",   "male",  "white",    "black",
                                               "asian",    "hispanic", "other", "neutral",
                                               "negative", "positive"};
  return levels;
}

std::string digest_hex(std::uint64_t d) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(d));
  return std::string(buf);
}

template <typename F>
auto stage(const std::string& name, F&& f) {
  try {
    return f();
  } catch (const StageError& e) {
    throw StageError(name + ": " + e.what());
  } catch (const ConfigError& e) {
    throw StageError(name + ": " + e.what());
  }
}

double feature_value(const Feature& f, const Observation& o, const geo::AttributeTable& attrs) {
  if (f.kind == "dummy") {
    if (f.field == "female") return o.female ? 1.0 : 0.0;
    if (f.field == "male") return o.female ? 0.0 : 1.0;
    if (f.field == "neutral") return o.sentiment == text::Sentiment::Neutral ? 1.0 : 0.0;
    if (f.field == "negative") return o.sentiment == text::Sentiment::Negative ? 1.0 : 0.0;
    if (f.field == "positive") return o.sentiment == text::Sentiment::Positive ? 1.0 : 0.0;
    return o.race == f.field ? 1.0 : 0.0;
  }
  const std::size_t col = attrs.column_index(f.field);
  const double v = attrs.rows[o.attr_row][col];
  if (f.kind == "gt") return v > f.arg ? 1.0 : 0.0;
  return v / f.arg;  // scale
}

}  // namespace

std::set<std::string> load_word_set(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open word list \"" + path + "\"");
  std::set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string w = trim(line);
    if (w.empty() || w[0] == '#') continue;
    out.insert(lower(w));
  }
  return out;
}

Feature parse_recipe(const std::string& recipe) {
  const auto bar = recipe.find('|');
  if (bar == std::string::npos)
    throw ConfigError("feature recipe \"" + recipe + "\" is missing the '|' separator");
  Feature f;
  f.name = trim(recipe.substr(0, bar));
  if (f.name.empty()) throw ConfigError("feature recipe \"" + recipe + "\" has an empty name");
  const std::string rhs = trim(recipe.substr(bar + 1));
  const auto colon = rhs.find(':');
  if (colon == std::string::npos)
    throw ConfigError("feature recipe \"" + recipe + "\" is missing ':' after the kind");
  f.kind = rhs.substr(0, colon);
  const std::string rest = rhs.substr(colon + 1);
  if (f.kind == "dummy") {
    f.field = lower(trim(rest));
    if (!dummy_levels().count(f.field))
      throw ConfigError("feature recipe \"" + recipe + "\": unknown dummy level \"" + f.field +
                        "\"");
    return f;
  }
  if (f.kind != "gt" && f.kind != "scale")
    throw ConfigError("feature recipe \"" + recipe + "\": unknown kind \"" + f.kind + "\"");
  const auto colon2 = rest.find(':');
  if (colon2 == std::string::npos)
    throw ConfigError("feature recipe \"" + recipe + "\" needs <field>:<number>");
  f.field = trim(rest.substr(0, colon2));
  if (f.field.empty()) throw ConfigError("feature recipe \"" + recipe + "\" has an empty field");
  f.arg = parse_double_strict(trim(rest.substr(colon2 + 1)));
  if (f.kind == "scale" && f.arg == 0.0)
    throw ConfigError("feature recipe \"" + recipe + "\": divisor must be nonzero");
  return f;
}

RunConfig load_run_config(const config::Table& t, const std::string& base_dir) {
  RunConfig cfg;
  const fs::path base(base_dir);
  auto resolve = [&](const std::string& p) {
    fs::path path(p);
    return (path.is_absolute() ? path : base / path).lexically_normal().string();
  };
  auto input_path = [&](const std::string& short_name) {
    const std::string key = "paths." + short_name;
    if (!t.has(key)) throw ConfigError(short_name + ": not configured");
    const std::string p = resolve(t.get_string(key));
    if (!fs::exists(p)) throw ConfigError(short_name + ": not found (" + p + ")");
    return p;
  };

  cfg.posts = input_path("posts");
  cfg.names_gender = input_path("names_gender");
  cfg.names_race = input_path("names_race");
  cfg.polygons = input_path("polygons");
  cfg.attributes = input_path("attributes");
  cfg.keywords = input_path("keywords");
  cfg.stopwords = input_path("stopwords");
  cfg.lexicon = input_path("lexicon");
  cfg.labeled_categories = input_path("labeled_categories");
  if (!t.has("paths.out_dir")) throw ConfigError("out_dir: not configured");
  cfg.out_dir = resolve(t.get_string("paths.out_dir"));

  if (t.has("paths.posts_format")) {
    cfg.posts_format = ingest::format_from_string(t.get_string("paths.posts_format"));
  } else {
    cfg.posts_format = lower(fs::path(cfg.posts).extension().string()) == ".csv"
                           ? ingest::Format::Csv
                           : ingest::Format::Jsonl;
  }

  cfg.seed_demographics = static_cast<std::uint64_t>(t.get_int_or("seeds.demographics", 13));
  cfg.seed_topics = static_cast<std::uint64_t>(t.get_int_or("seeds.topics", 7));
  cfg.seed_classifier = static_cast<std::uint64_t>(t.get_int_or("seeds.classifier", 11));

  cfg.lda_topics = static_cast<std::size_t>(t.get_int_or("lda.topics", 4));
  cfg.lda_iterations = static_cast<std::size_t>(t.get_int_or("lda.iterations", 200));
  cfg.lda_alpha = t.get_double_or("lda.alpha", 0.0);
  cfg.lda_beta = t.get_double_or("lda.beta", 0.01);
  cfg.lda_min_doc_freq = static_cast<std::size_t>(t.get_int_or("lda.min_doc_freq", 2));
  cfg.lda_top_words = static_cast<std::size_t>(t.get_int_or("lda.top_words", 10));
  if (cfg.lda_topics < 1) throw ConfigError("lda.topics must be >= 1");
  if (cfg.lda_iterations < 1) throw ConfigError("lda.iterations must be >= 1");

  cfg.gender_algorithm = names::algorithm_from_string(
      t.get_string_or("demographics.gender_algorithm", "naive_bayes"));
  cfg.race_algorithm =
      names::algorithm_from_string(t.get_string_or("demographics.race_algorithm", "naive_bayes"));
  cfg.name_params.knn_k = static_cast<int>(t.get_int_or("demographics.knn_k", 5));
  cfg.name_params.dt_max_depth = static_cast<int>(t.get_int_or("demographics.dt_max_depth", 12));
  cfg.name_params.dt_min_leaf = static_cast<int>(t.get_int_or("demographics.dt_min_leaf", 5));
  cfg.name_params.bag_trees = static_cast<int>(t.get_int_or("demographics.bag_trees", 25));

  cfg.geocoder_url = t.get_string_or("geocoder.url", "");
  if (const char* env = std::getenv("CIVIC_GEOCODER_URL"); env != nullptr && env[0] != '\0')
    cfg.geocoder_url = env;

  // [models.<name>] sections, in sorted name order
  std::set<std::string> model_names;
  for (const auto& key : t.keys_with_prefix("models.")) {
    const auto dot = key.find('.', 8);
    if (dot == std::string::npos)
      throw ConfigError("model key \"" + key + "\" needs the form models.<name>.<field>");
    model_names.insert(key.substr(7, dot - 7));
  }
  for (const auto& name : model_names) {
    ModelSpec spec;
    spec.name = name;
    const std::string prefix = "models." + name + ".";
    const std::int64_t outcome = t.get_int(prefix + "outcome");
    if (outcome < 0 || outcome >= text::kCategories)
      throw ConfigError("model \"" + name + "\": outcome category out of range");
    spec.outcome_category = static_cast<int>(outcome);
    std::set<std::string> seen;
    for (const auto& recipe : t.get_string_list(prefix + "features")) {
      Feature f = parse_recipe(recipe);
      if (!seen.insert(f.name).second)
        throw ConfigError("model \"" + name + "\": duplicate feature name \"" + f.name + "\"");
      spec.features.push_back(std::move(f));
    }
    if (spec.features.empty()) throw ConfigError("model \"" + name + "\" has no features");
    cfg.models.push_back(std::move(spec));
  }
  if (cfg.models.empty()) throw ConfigError("models: none configured");
  return cfg;
}

Demographics infer_demographics(const std::vector<ingest::PostRecord>& posts,
                                const names::NameModel& gender_model,
                                const names::NameModel& race_model) {
  Demographics d;
  d.female.assign(posts.size(), 0);
  d.race.assign(posts.size(), "");

  auto gather = [&](auto extract) {
    std::pair<std::vector<std::string>, std::vector<std::size_t>> out;
    for (std::size_t i = 0; i < posts.size(); ++i) {
      auto token = extract(posts[i].display_name);
      if (!token) continue;
      try {
        names::normalize_name(*token);
      } catch (const ConfigError&) {
        continue;  // no letters to work with
      }
      out.first.push_back(*token);
      out.second.push_back(i);
    }
    return out;
  };

  auto [gnames, gidx] = gather([](const std::string& n) { return ingest::first_name_of(n); });
  auto gpred = names::predict_batch(gender_model, gnames);
  for (std::size_t j = 0; j < gpred.size(); ++j) {
    const std::string l = lower(gpred[j].label);
    d.female[gidx[j]] = (l == "f" || l == "female") ? 1 : 0;
  }

  auto [rnames, ridx] = gather([](const std::string& n) { return ingest::last_name_of(n); });
  auto rpred = names::predict_batch(race_model, rnames);
  for (std::size_t j = 0; j < rpred.size(); ++j) d.race[ridx[j]] = lower(rpred[j].label);

  return d;
}

logit::DesignData build_design(const ModelSpec& spec, const std::vector<Observation>& obs,
                               const geo::AttributeTable& attrs) {
  logit::DesignData d;
  const std::size_t k = spec.features.size() + 1;
  d.names.reserve(k);
  d.names.push_back("Constant");
  for (const auto& f : spec.features) d.names.push_back(f.name);
  d.x = Matrix(obs.size(), k);
  d.y.resize(obs.size());
  for (std::size_t i = 0; i < obs.size(); ++i) {
    d.y[i] = obs[i].category == spec.outcome_category ? 1.0 : 0.0;
    d.x(i, 0) = 1.0;
    for (std::size_t j = 0; j < spec.features.size(); ++j)
      d.x(i, j + 1) = feature_value(spec.features[j], obs[i], attrs);
  }
  return d;
}

RunResult run_pipeline(const RunConfig& cfg, std::ostream& log) {
  RunResult result;
  fs::create_directories(cfg.out_dir);

  auto write_output = [&](const std::string& rel, const std::string& content) {
    const fs::path path = fs::path(cfg.out_dir) / rel;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw StageError("cannot write \"" + path.string() + "\"");
    out << content;
    if (!out) throw StageError("short write to \"" + path.string() + "\"");
    result.outputs.push_back(rel);
  };

  // ---- ingest ------------------------------------------------------------
  ingest::ParseResult parsed = stage("ingest", [&] {
    auto p = ingest::parse_posts(cfg.posts, cfg.posts_format);
    if (p.records.empty()) throw StageError("no valid posts in \"" + cfg.posts + "\"");
    return p;
  });
  result.counts.parsed = parsed.records.size();
  result.counts.malformed = parsed.errors.size();
  log << "[ingest] parsed " << result.counts.parsed << " posts, " << result.counts.malformed
      << " malformed rows\n";

  // ---- relevance filter --------------------------------------------------
  std::vector<ingest::PostRecord> posts;
  std::vector<ingest::TokenizedDoc> docs;
  stage("filter", [&] {
    const auto stopwords = load_word_set(cfg.stopwords);
    const auto keywords = load_word_set(cfg.keywords);
    if (keywords.empty()) throw StageError("keyword list is empty");
    auto all_docs = ingest::tokenize_posts(parsed.records, stopwords);
    for (std::size_t i = 0; i < all_docs.size(); ++i) {
      if (!ingest::relevance_filter(all_docs[i], keywords)) continue;
      posts.push_back(parsed.records[i]);
      docs.push_back(std::move(all_docs[i]));
    }
    if (posts.empty()) throw StageError("no posts passed the relevance filter");
    return 0;
  });
  result.counts.relevant = posts.size();
  log << "[filter] " << result.counts.relevant << " of " << result.counts.parsed
      << " posts are relevant\n";

  // ---- demographics ------------------------------------------------------
  Demographics demo = stage("demographics", [&] {
    const auto gender_data = names::load_examples_csv(cfg.names_gender);
    const auto race_data = names::load_examples_csv(cfg.names_race);
    const auto gender_model = names::train(gender_data, names::Task::Gender, cfg.gender_algorithm,
                                           cfg.name_params, cfg.seed_demographics);
    const auto race_model = names::train(race_data, names::Task::Race, cfg.race_algorithm,
                                         cfg.name_params, cfg.seed_demographics + 1);
    return infer_demographics(posts, gender_model, race_model);
  });
  {
    std::size_t nf = 0, nr = 0;
    for (int f : demo.female) nf += static_cast<std::size_t>(f);
    for (const auto& r : demo.race) nr += r.empty() ? 0 : 1;
    log << "[demographics] " << nf << " inferred female, " << nr << " with race labels\n";
  }

  // ---- topics ------------------------------------------------------------
  stage("topics", [&] {
    auto corpus = lda::build_corpus(docs, cfg.lda_min_doc_freq);
    if (corpus.docs.empty()) throw StageError("corpus is empty after pruning");
    lda::LdaOptions opt;
    opt.topics = cfg.lda_topics;
    opt.alpha = cfg.lda_alpha;
    opt.beta = cfg.lda_beta;
    opt.iterations = cfg.lda_iterations;
    opt.seed = cfg.seed_topics;
    auto model = lda::fit_lda(corpus, opt);
    write_output("topics.csv", lda::top_words_csv(model, cfg.lda_top_words));
    log << "[topics] " << model.topics << " topics over " << corpus.vocabulary.size()
        << " vocabulary words, mean coherence "
        << report::fmt3(lda::mean_coherence(model, corpus, cfg.lda_top_words)) << "\n";
    return 0;
  });

  // ---- classify ----------------------------------------------------------
  std::vector<int> categories = stage("classify", [&] {
    const auto labeled = text::load_labeled_csv(cfg.labeled_categories);
    const auto stopwords = load_word_set(cfg.stopwords);
    const auto model = text::NaiveBayesText::train(labeled, stopwords, cfg.seed_classifier);
    return text::classify_batch(model, docs);
  });
  log << "[classify] assigned categories to " << categories.size() << " posts\n";

  // ---- sentiment ---------------------------------------------------------
  std::vector<text::Sentiment> sentiments = stage("sentiment", [&] {
    const auto lexicon = text::load_lexicon_csv(cfg.lexicon);
    const auto scores = text::sentiment_batch(docs, lexicon);
    std::vector<text::Sentiment> out(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) out[i] = text::sentiment_of(scores[i]);
    return out;
  });

  // ---- fuse --------------------------------------------------------------
  geo::AttributeTable attrs;
  std::vector<Observation> observations;
  stage("fuse", [&] {
    const auto groups = geo::load_geojson(cfg.polygons);
    attrs = geo::load_attributes_csv(cfg.attributes);
    std::vector<std::optional<std::string>> geoids;
    if (cfg.geocoder_url.empty()) {
      geoids = geo::locate_batch(groups, posts);
    } else {
      geoids.resize(posts.size());
      for (std::size_t i = 0; i < posts.size(); ++i) {
        try {
          geoids[i] = geo::fetch_geoid_remote(cfg.geocoder_url, posts[i].latitude,
                                              posts[i].longitude);
        } catch (const StageError&) {
          geoids[i] = geo::locate(groups, posts[i].latitude, posts[i].longitude);
        }
      }
    }
    auto [fused, errors] = geo::join_attributes(geoids, attrs);
    for (std::size_t i = 0; i < fused.size(); ++i) {
      if (fused[i].geoid) ++result.counts.located;
      if (!fused[i].attr_row) continue;
      Observation o;
      o.post_id = posts[i].post_id;
      o.category = categories[i];
      o.sentiment = sentiments[i];
      o.female = demo.female[i];
      o.race = demo.race[i];
      o.geoid = *fused[i].geoid;
      o.attr_row = *fused[i].attr_row;
      observations.push_back(std::move(o));
    }
    result.counts.outside = posts.size() - result.counts.located;
    result.counts.unmatched = errors.size();
    result.counts.fused = observations.size();
    if (observations.empty()) throw StageError("no posts could be fused with block groups");
    return 0;
  });
  log << "[fuse] " << result.counts.fused << " fused (" << result.counts.outside
      << " outside all polygons, " << result.counts.unmatched << " unmatched geoids)\n";

  // ---- fit ---------------------------------------------------------------
  for (const auto& spec : cfg.models) {
    stage("fit[" + spec.name + "]", [&] {
      auto design = build_design(spec, observations, attrs);
      report::FitReport rep;
      rep.model_name = spec.name;
      rep.fit = logit::fit(design);
      log << "[fit] " << spec.name << ": ll " << report::fmt3(rep.fit.log_lik) << ", rho-sq "
          << report::fmt3(rep.fit.adjusted_rho_sq)
          << (rep.fit.converged ? "" : " (did not converge)") << "\n";
      result.fits.push_back(std::move(rep));
      return 0;
    });
  }

  // ---- report ------------------------------------------------------------
  stage("report", [&] {
    // Numeric stats: per-model outcome indicators, then every distinct
    // feature, in first-appearance order.
    std::vector<std::pair<std::string, std::vector<double>>> columns;
    for (const auto& spec : cfg.models) {
      std::vector<double> y(observations.size());
      for (std::size_t i = 0; i < observations.size(); ++i)
        y[i] = observations[i].category == spec.outcome_category ? 1.0 : 0.0;
      columns.emplace_back("Outcome: " + spec.name, std::move(y));
    }
    std::set<std::string> seen;
    for (const auto& spec : cfg.models) {
      for (const auto& f : spec.features) {
        if (!seen.insert(f.name).second) continue;
        std::vector<double> v(observations.size());
        for (std::size_t i = 0; i < observations.size(); ++i)
          v[i] = feature_value(f, observations[i], attrs);
        columns.emplace_back(f.name, std::move(v));
      }
    }
    write_output("stats.csv",
                 report::render_stats(report::descriptive_stats(columns), report::Format::Csv));

    // Categorical summaries over the fused rows.
    std::string cats = "variable,level,count,percentage\n";
    auto append_summary = [&cats](const std::string& variable,
                                  const std::vector<std::string>& column) {
      for (const auto& row : report::categorical_summary(column)) {
        cats += csv::join_row(
            {variable, row.level, std::to_string(row.count), report::fmt3(row.percentage)});
        cats += "\n";
      }
    };
    std::vector<std::string> gcol, rcol, scol, ccol;
    for (const auto& o : observations) {
      gcol.push_back(o.female ? "female" : "other");
      rcol.push_back(o.race.empty() ? "unknown" : o.race);
      scol.push_back(text::to_string(o.sentiment));
      ccol.push_back(text::category_names()[static_cast<std::size_t>(o.category)]);
    }
    append_summary("gender", gcol);
    append_summary("race", rcol);
    append_summary("sentiment", scol);
    append_summary("category", ccol);
    write_output("categories.csv", cats);

    // Topic/sentiment heat-map counts over all relevant posts.
    write_output("crosstab.csv",
                 report::render_crosstab(report::topic_sentiment_crosstab(categories, sentiments),
                                         report::Format::Csv));

    for (const auto& rep : result.fits) {
      write_output("model_" + rep.model_name + ".csv",
                   report::render_fit(rep, report::Format::Csv));
      write_output("model_" + rep.model_name + ".json",
                   report::render_fit(rep, report::Format::Json));
      write_output("model_" + rep.model_name + ".md",
                   report::render_fit(rep, report::Format::Markdown));
    }
    return 0;
  });

  // ---- manifest ----------------------------------------------------------
  stage("manifest", [&] {
    json inputs;
    inputs["posts"] = digest_hex(fnv1a64_file(cfg.posts));
    inputs["names_gender"] = digest_hex(fnv1a64_file(cfg.names_gender));
    inputs["names_race"] = digest_hex(fnv1a64_file(cfg.names_race));
    inputs["polygons"] = digest_hex(fnv1a64_file(cfg.polygons));
    inputs["attributes"] = digest_hex(fnv1a64_file(cfg.attributes));
    inputs["keywords"] = digest_hex(fnv1a64_file(cfg.keywords));
    inputs["stopwords"] = digest_hex(fnv1a64_file(cfg.stopwords));
    inputs["lexicon"] = digest_hex(fnv1a64_file(cfg.lexicon));
    inputs["labeled_categories"] = digest_hex(fnv1a64_file(cfg.labeled_categories));

    json models = json::array();
    for (const auto& rep : result.fits) {
      models.push_back({{"name", rep.model_name},
                        {"observations", rep.fit.observations},
                        {"coefficients", rep.fit.beta.size()},
                        {"log_likelihood", rep.fit.log_lik},
                        {"adjusted_rho_sq", rep.fit.adjusted_rho_sq},
                        {"iterations", rep.fit.iterations},
                        {"converged", rep.fit.converged}});
    }

    json manifest{
        {"artifact", {{"name", "civic"}, {"version", "0.1.0"}}},
        {"seeds",
         {{"demographics", cfg.seed_demographics},
          {"topics", cfg.seed_topics},
          {"classifier", cfg.seed_classifier}}},
        {"lda",
         {{"topics", cfg.lda_topics},
          {"alpha", cfg.lda_alpha},
          {"beta", cfg.lda_beta},
          {"iterations", cfg.lda_iterations},
          {"min_doc_freq", cfg.lda_min_doc_freq}}},
        {"inputs", inputs},
        {"counts",
         {{"parsed", result.counts.parsed},
          {"malformed", result.counts.malformed},
          {"relevant", result.counts.relevant},
          {"located", result.counts.located},
          {"outside", result.counts.outside},
          {"unmatched", result.counts.unmatched},
          {"fused", result.counts.fused}}},
        {"coverage",
         {{"relevant", result.counts.relevant},
          {"inside_share",
           static_cast<double>(result.counts.located) /
               static_cast<double>(result.counts.relevant)}}},
        {"models", models},
        {"outputs", result.outputs}};
    result.manifest = manifest;
    write_output("manifest.json", manifest.dump(2) + "\n");
    return 0;
  });
  log << "[manifest] wrote " << result.outputs.size() << " files to " << cfg.out_dir << "\n";

  return result;
}

}  // namespace civic::pipeline
