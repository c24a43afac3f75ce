#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "civic/common.hpp"
#include "civic/config.hpp"

using namespace civic;

static const char* kSample = R"(# run settings
title = "demo run"

[paths]
posts = "fixtures/posts.jsonl"   # relative to repo root
out_dir = "out"

[lda]
topics = 4
alpha = 0.5
iterations = 200

[flags]
remote = false
formats = ["csv", "json", "md"]
empty = []
)";

TEST_CASE("toml subset parses sections, scalars and arrays") {
  auto t = config::Table::parse(kSample);
  CHECK(t.get_string("title") == "demo run");
  CHECK(t.get_string("paths.posts") == "fixtures/posts.jsonl");
  CHECK(t.get_int("lda.topics") == 4);
  CHECK(t.get_double("lda.alpha") == 0.5);
  CHECK(t.get_double("lda.topics") == 4.0);  // int promotes to double
  CHECK(t.get_bool("flags.remote") == false);
  CHECK(t.get_string_list("flags.formats") ==
        std::vector<std::string>{"csv", "json", "md"});
  CHECK(t.get_string_list("flags.empty").empty());
  CHECK(t.has("lda.iterations"));
  CHECK(!t.has("lda.beta"));
  CHECK(t.get_int_or("lda.beta", 9) == 9);
  CHECK(t.get_string_or("missing", "x") == "x");
}

TEST_CASE("arrays may span multiple lines") {
  auto t = config::Table::parse(
      "xs = [\n  \"a\",  # first\n  \"b\",\n  \"c\"\n]\nafter = 1\n");
  CHECK(t.get_string_list("xs") == std::vector<std::string>{"a", "b", "c"});
  CHECK(t.get_int("after") == 1);
  CHECK_THROWS_WITH_AS(config::Table::parse("xs = [\n \"a\",\n"),
                       doctest::Contains("unterminated array"), ConfigError);
}

TEST_CASE("string escapes and inline comments") {
  auto t = config::Table::parse("s = \"a \\\"b\\\" \\\\ c\\n\"  # trailing\nn = 3 # three\n");
  CHECK(t.get_string("s") == "a \"b\" \\ c\n");
  CHECK(t.get_int("n") == 3);
}

TEST_CASE("parse errors carry line numbers") {
  CHECK_THROWS_WITH_AS(config::Table::parse("x 1\n"),
                       doctest::Contains("line 1"), ConfigError);
  CHECK_THROWS_WITH_AS(config::Table::parse("a = 1\na = 2\n"),
                       doctest::Contains("duplicate key"), ConfigError);
  CHECK_THROWS_AS(config::Table::parse("[open\n"), ConfigError);
  CHECK_THROWS_AS(config::Table::parse("k = \"unterminated\n"), ConfigError);
  CHECK_THROWS_AS(config::Table::parse("k = what\n"), ConfigError);
  CHECK_THROWS_AS(config::Table::parse("k = [1, 2]\n"), ConfigError);
  CHECK_THROWS_AS(config::Table::parse("k = \"x\" junk\n"), ConfigError);
}

TEST_CASE("type mismatches and missing keys are config errors") {
  auto t = config::Table::parse("a = 1\nb = \"s\"\n");
  CHECK_THROWS_AS(t.get_string("a"), ConfigError);
  CHECK_THROWS_AS(t.get_int("b"), ConfigError);
  CHECK_THROWS_AS(t.get_bool("a"), ConfigError);
  CHECK_THROWS_AS(t.get_string_list("a"), ConfigError);
  CHECK_THROWS_WITH_AS(t.get_int("zz"), doctest::Contains("missing config key"), ConfigError);
}

TEST_CASE("overrides win over file values and parse leniently") {
  auto t = config::Table::parse("[lda]\ntopics = 4\n");
  t.set_override("lda.topics", "8");
  CHECK(t.get_int("lda.topics") == 8);
  t.set_override("paths.out_dir", "elsewhere");  // bare string accepted
  CHECK(t.get_string("paths.out_dir") == "elsewhere");
  t.set_override("flag", "true");
  CHECK(t.get_bool("flag") == true);
  t.set_override("list", "[\"a\",\"b\"]");
  CHECK(t.get_string_list("list") == std::vector<std::string>{"a", "b"});
  CHECK_THROWS_AS(t.set_override("bad key!", "1"), ConfigError);
}

TEST_CASE("key listing and prefixes") {
  auto t = config::Table::parse("[b]\ny = 1\n[a]\nx = 1\n");
  CHECK(t.keys() == std::vector<std::string>{"a.x", "b.y"});
  CHECK(t.keys_with_prefix("a.") == std::vector<std::string>{"a.x"});
  CHECK_THROWS_AS(config::Table::parse_file("/nonexistent/zz.toml"), ConfigError);
}
