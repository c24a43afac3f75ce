#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "civic/common.hpp"
#include "civic/pipeline.hpp"

using namespace civic;
namespace fs = std::filesystem;

static std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

TEST_CASE("feature recipes parse and reject") {
  auto f = pipeline::parse_recipe("Female (1=Female, 0=Other)|dummy:female");
  CHECK(f.name == "Female (1=Female, 0=Other)");
  CHECK(f.kind == "dummy");
  CHECK(f.field == "female");

  auto g = pipeline::parse_recipe("Median Income more than 50,000|gt:median_income:50000");
  CHECK(g.kind == "gt");
  CHECK(g.field == "median_income");
  CHECK(g.arg == 50000.0);

  auto s = pipeline::parse_recipe("Traffic (percentile)|scale:traffic_pctile:100");
  CHECK(s.kind == "scale");
  CHECK(s.arg == 100.0);

  CHECK_THROWS_AS(pipeline::parse_recipe("no separator"), ConfigError);
  CHECK_THROWS_AS(pipeline::parse_recipe("x|unknown:female"), ConfigError);
  CHECK_THROWS_AS(pipeline::parse_recipe("x|dummy:purple"), ConfigError);
  CHECK_THROWS_AS(pipeline::parse_recipe("x|gt:field"), ConfigError);
  CHECK_THROWS_AS(pipeline::parse_recipe("x|gt:field:abc"), ConfigError);
  CHECK_THROWS_AS(pipeline::parse_recipe("x|scale:field:0"), ConfigError);
  CHECK_THROWS_AS(pipeline::parse_recipe("|dummy:female"), ConfigError);
}

static geo::AttributeTable tiny_attrs() {
  geo::AttributeTable t;
  t.columns = {"median_income", "traffic_pctile"};
  t.geoids = {"A", "B"};
  t.rows = {{126953.0, 78.0}, {50000.0, 10.0}};
  t.row_of = {{"A", 0}, {"B", 1}};
  return t;
}

TEST_CASE("design matrix from recipes matches hand values") {
  pipeline::ModelSpec spec;
  spec.name = "demo";
  spec.outcome_category = 2;
  spec.features = {
      pipeline::parse_recipe("Income > 50k|gt:median_income:50000"),
      pipeline::parse_recipe("Traffic|scale:traffic_pctile:100"),
      pipeline::parse_recipe("Female|dummy:female"),
      pipeline::parse_recipe("White|dummy:white"),
      pipeline::parse_recipe("Negative|dummy:negative"),
  };
  std::vector<pipeline::Observation> obs(2);
  obs[0] = {"p1", 2, text::Sentiment::Negative, 1, "white", "A", 0};
  obs[1] = {"p2", 0, text::Sentiment::Neutral, 0, "asian", "B", 1};

  auto d = pipeline::build_design(spec, obs, tiny_attrs());
  REQUIRE(d.names.size() == 6);
  CHECK(d.names[0] == "Constant");
  CHECK(d.names[1] == "Income > 50k");
  CHECK(d.y == std::vector<double>{1.0, 0.0});
  CHECK(d.x(0, 0) == 1.0);
  CHECK(d.x(0, 1) == 1.0);  // 126953 > 50000
  CHECK(d.x(1, 1) == 0.0);  // exactly 50000: strict inequality
  CHECK(d.x(0, 2) == doctest::Approx(0.78).epsilon(1e-12));
  CHECK(d.x(0, 3) == 1.0);
  CHECK(d.x(1, 3) == 0.0);
  CHECK(d.x(0, 4) == 1.0);
  CHECK(d.x(1, 4) == 0.0);
  CHECK(d.x(0, 5) == 1.0);
  CHECK(d.x(1, 5) == 0.0);

  spec.features.push_back(pipeline::parse_recipe("Ghost|gt:not_a_column:1"));
  CHECK_THROWS_AS(pipeline::build_design(spec, obs, tiny_attrs()), ConfigError);
}

TEST_CASE("word set loader lowercases and skips comments") {
  const fs::path dir = fs::path(CIVIC_TEST_TMP_DIR) / "wordset";
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "words.txt", std::ios::binary);
    out << "# comment\nBus\n\n  train  \nbus\n";
  }
  auto words = pipeline::load_word_set((dir / "words.txt").string());
  CHECK(words == std::set<std::string>{"bus", "train"});
  CHECK_THROWS_AS(pipeline::load_word_set("/no/such/file"), ConfigError);
}

TEST_CASE("run config validates paths and model sections") {
  const std::string fixture = CIVIC_FIXTURE_DIR;
  auto table = config::Table::parse_file(fixture + "/config.toml");
  auto cfg = pipeline::load_run_config(table, fixture);
  REQUIRE(cfg.models.size() == 3);
  CHECK(cfg.models[0].name == "accessibility");
  CHECK(cfg.models[0].outcome_category == 2);
  CHECK(cfg.models[0].features.size() == 15);
  CHECK(cfg.models[1].name == "disparity");
  CHECK(cfg.models[1].features.size() == 14);
  CHECK(cfg.models[2].name == "infrastructure");
  CHECK(cfg.models[2].features.size() == 10);
  CHECK(cfg.lda_topics == 4);
  CHECK(cfg.seed_topics == 7);
  CHECK(cfg.posts_format == ingest::Format::Jsonl);

  auto broken = table;
  broken.set_override("paths.polygons", "missing.geojson");
  CHECK_THROWS_WITH_AS(pipeline::load_run_config(broken, fixture),
                       doctest::Contains("polygons: not found"), ConfigError);

  config::Table empty;
  CHECK_THROWS_WITH_AS(pipeline::load_run_config(empty, fixture),
                       doctest::Contains("posts: not configured"), ConfigError);
}

TEST_CASE("fixture pipeline runs deterministically end to end") {
  const std::string fixture = CIVIC_FIXTURE_DIR;
  const fs::path tmp = fs::path(CIVIC_TEST_TMP_DIR) / "pipeline";
  fs::remove_all(tmp);

  auto table = config::Table::parse_file(fixture + "/config.toml");
  table.set_override("paths.out_dir", (tmp / "run1").string());
  auto cfg1 = pipeline::load_run_config(table, fixture);
  std::ostringstream log1;
  auto r1 = pipeline::run_pipeline(cfg1, log1);

  table.set_override("paths.out_dir", (tmp / "run2").string());
  auto cfg2 = pipeline::load_run_config(table, fixture);
  std::ostringstream log2;
  auto r2 = pipeline::run_pipeline(cfg2, log2);

  // stage counts are internally consistent
  CHECK(r1.counts.parsed == 2000);
  CHECK(r1.counts.malformed == 5);
  CHECK(r1.counts.relevant <= r1.counts.parsed);
  CHECK(r1.counts.relevant > 1800);
  CHECK(r1.counts.located + r1.counts.outside == r1.counts.relevant);
  CHECK(r1.counts.unmatched > 0);  // square 11 has no attribute row
  CHECK(r1.counts.fused == r1.counts.located - r1.counts.unmatched);
  CHECK(r1.counts.fused > 1200);

  REQUIRE(r1.fits.size() == 3);
  for (const auto& rep : r1.fits) {
    CHECK(rep.fit.converged);
    CHECK(rep.fit.observations == r1.counts.fused);
    CHECK(rep.fit.log_lik >= rep.fit.null_log_lik);
  }

  // two runs: byte-identical outputs
  REQUIRE(r1.outputs == r2.outputs);
  for (const auto& rel : r1.outputs) {
    CAPTURE(rel);
    CHECK(slurp(tmp / "run1" / rel) == slurp(tmp / "run2" / rel));
  }

  const std::vector<std::string> expected = {
      "topics.csv",       "stats.csv",          "categories.csv",
      "crosstab.csv",     "model_accessibility.csv", "model_accessibility.json",
      "model_accessibility.md", "manifest.json"};
  for (const auto& name : expected) {
    CAPTURE(name);
    CHECK(fs::exists(tmp / "run1" / name));
  }

  // model table schema: coefficient rows then N / LL(full) / LL(null) / rho
  const std::string table_csv = slurp(tmp / "run1" / "model_accessibility.csv");
  CHECK(table_csv.find("variable,parameter,t_stat\n") == 0);
  CHECK(table_csv.find("Constant,") != std::string::npos);
  CHECK(table_csv.find("\nN,") != std::string::npos);
  CHECK(table_csv.find("\nLL(full),") != std::string::npos);
  CHECK(table_csv.find("\nLL(null),") != std::string::npos);
  CHECK(table_csv.find("\nadjusted_rho_sq,") != std::string::npos);

  // manifest invariants
  const auto manifest = nlohmann::json::parse(slurp(tmp / "run1" / "manifest.json"));
  CHECK(manifest["counts"]["relevant"].get<std::size_t>() <=
        manifest["counts"]["parsed"].get<std::size_t>());
  CHECK(manifest["counts"]["fused"].get<std::size_t>() <=
        manifest["counts"]["relevant"].get<std::size_t>());
  CHECK(manifest["models"].size() == 3);
  CHECK(manifest["inputs"].size() == 9);
  CHECK(manifest["seeds"]["topics"] == 7);
}
