#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "civic/config.hpp"
#include "civic/geo.hpp"
#include "civic/ingest.hpp"
#include "civic/logit.hpp"
#include "civic/name_model.hpp"
#include "civic/report.hpp"
#include "civic/text_classify.hpp"

namespace civic::pipeline {

// One keyword / stopword per line; blank lines and # comments skipped,
// entries lowercased.
std::set<std::string> load_word_set(const std::string& path);

// Feature recipes are "<display name>|<kind>:<args>" with kinds
//   dummy:<female|white|black|asian|hispanic|neutral|negative|positive>
//   gt:<attribute>:<threshold>     strict > indicator
//   scale:<attribute>:<divisor>    raw attribute divided by a constant
struct Feature {
  std::string name;   // display name for report tables
  std::string kind;   // dummy | gt | scale
  std::string field;  // dummy level, or attribute column
  double arg = 0.0;   // threshold or divisor
};

Feature parse_recipe(const std::string& recipe);

struct ModelSpec {
  std::string name;
  int outcome_category = 0;  // the category index the outcome marks
  std::vector<Feature> features;
};

struct RunConfig {
  // input paths, resolved against the config file's directory
  std::string posts, names_gender, names_race, polygons, attributes, keywords,
      stopwords, lexicon, labeled_categories, out_dir;
  ingest::Format posts_format = ingest::Format::Jsonl;

  std::uint64_t seed_demographics = 13;
  std::uint64_t seed_topics = 7;
  std::uint64_t seed_classifier = 11;

  std::size_t lda_topics = 4;
  std::size_t lda_iterations = 200;
  double lda_alpha = 0.0;  // 0 -> 50/K
  double lda_beta = 0.01;
  std::size_t lda_min_doc_freq = 2;
  std::size_t lda_top_words = 10;

  names::Algorithm gender_algorithm = names::Algorithm::NaiveBayes;
  names::Algorithm race_algorithm = names::Algorithm::NaiveBayes;
  names::Hyperparams name_params;

  std::string geocoder_url;  // empty -> offline point-in-polygon only

  std::vector<ModelSpec> models;
};

// Validates presence of every input path ("<key>: not found"). Relative paths
// resolve against base_dir. CIVIC_GEOCODER_URL overrides geocoder.url.
RunConfig load_run_config(const config::Table& table, const std::string& base_dir);

struct Demographics {
  std::vector<int> female;        // 0/1 per post
  std::vector<std::string> race;  // lowercased label, "" when unknown
};

Demographics infer_demographics(const std::vector<ingest::PostRecord>& posts,
                                const names::NameModel& gender_model,
                                const names::NameModel& race_model);

// One modeling row: a relevant post that landed in a matched block group.
struct Observation {
  std::string post_id;
  int category = 0;
  text::Sentiment sentiment = text::Sentiment::Neutral;
  int female = 0;
  std::string race;  // "" when unknown
  std::string geoid;
  std::size_t attr_row = 0;
};

logit::DesignData build_design(const ModelSpec& spec, const std::vector<Observation>& obs,
                               const geo::AttributeTable& attrs);

struct StageCounts {
  std::size_t parsed = 0;
  std::size_t malformed = 0;
  std::size_t relevant = 0;
  std::size_t located = 0;    // relevant posts inside some polygon
  std::size_t outside = 0;    // relevant posts outside every polygon
  std::size_t unmatched = 0;  // located posts whose geoid has no attribute row
  std::size_t fused = 0;      // modeling rows
};

struct RunResult {
  StageCounts counts;
  std::vector<report::FitReport> fits;
  nlohmann::json manifest;
  std::vector<std::string> outputs;  // files written, relative to out_dir
};

// ingest -> filter -> demographics -> topics -> classify -> sentiment ->
// fuse -> fit -> report. Writes stats.csv, categories.csv, crosstab.csv,
// topics.csv, model_<name>.{csv,json,md} and manifest.json into out_dir.
// Stage failures surface as StageError prefixed with the stage name;
// outputs written before the failure are retained.
RunResult run_pipeline(const RunConfig& cfg, std::ostream& log);

}  // namespace civic::pipeline
