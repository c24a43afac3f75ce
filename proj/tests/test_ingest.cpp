#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <set>
#include <string>

#include "civic/common.hpp"
#include "civic/ingest.hpp"

using namespace civic;
using namespace civic::ingest;

TEST_CASE("iso8601 parses and formats round trip") {
  CHECK(parse_iso8601_utc("2020-05-01T12:00:00Z") == 1588334400);
  CHECK(parse_iso8601_utc("1970-01-01T00:00:00Z") == 0);
  CHECK(parse_iso8601_utc("2020-05-01 12:00:00") == 1588334400);  // space separator tolerated
  CHECK(format_iso8601_utc(1588334400) == "2020-05-01T12:00:00Z");
  CHECK(format_iso8601_utc(0) == "1970-01-01T00:00:00Z");
  CHECK_THROWS_AS(parse_iso8601_utc("not-a-date"), ConfigError);
  CHECK_THROWS_AS(parse_iso8601_utc("2020-13-01T00:00:00Z"), ConfigError);
  CHECK_THROWS_AS(parse_iso8601_utc("2020-05-01T25:00:00Z"), ConfigError);
}

TEST_CASE("jsonl ingest keeps good rows in order and collects bad ones") {
  const std::string path = "tmp_posts.jsonl";
  write_text_file(path,
      R"({"id":"1","user_id":"u1","name":"Ann Lee","description":"planner","text":"The bus is late","lat":41.5,"lon":-81.6,"created_at":"2020-05-01T12:00:00Z"})" "\n"
      R"({"id":"2","user_id":"u2","name":"Bob","description":"","text":"hi","lat":95.0,"lon":10.0,"created_at":"2020-05-01T12:00:00Z"})" "\n"
      "this is not json\n"
      R"({"id":"1","user_id":"u3","name":"Dup","description":"","text":"dup","lat":0.0,"lon":0.0,"created_at":"2020-05-01T12:00:00Z"})" "\n"
      R"({"id":"3","user_id":"u4","name":"Carol","description":"","text":"ok","lat":-10.0,"lon":170.0,"created_at":"2021-01-01T00:00:00Z"})" "\n"
      R"({"id":"4","user_id":"u5","name":"Dan","description":"","text":"x","lat":1.0,"lon":-181.0,"created_at":"2021-01-01T00:00:00Z"})" "\n");
  ParseResult r = parse_posts(path, Format::Jsonl);
  std::remove(path.c_str());

  REQUIRE(r.records.size() == 2);
  CHECK(r.records[0].post_id == "1");
  CHECK(r.records[0].display_name == "Ann Lee");
  CHECK(r.records[0].latitude == doctest::Approx(41.5));
  CHECK(r.records[0].timestamp == 1588334400);
  CHECK(r.records[1].post_id == "3");

  REQUIRE(r.errors.size() == 4);
  CHECK(r.errors[0].line == 2);
  CHECK(r.errors[0].message == "latitude out of range");
  CHECK(r.errors[1].line == 3);
  CHECK(r.errors[2].line == 4);
  CHECK(r.errors[2].message == "duplicate post id \"1\"");
  CHECK(r.errors[3].line == 6);
  CHECK(r.errors[3].message == "longitude out of range");
}

TEST_CASE("jsonl ingest reports missing fields with the line number") {
  const std::string path = "tmp_posts2.jsonl";
  write_text_file(path, R"({"id":"1","user_id":"u1","name":"A"})" "\n");
  ParseResult r = parse_posts(path, Format::Jsonl);
  std::remove(path.c_str());
  CHECK(r.records.empty());
  REQUIRE(r.errors.size() == 1);
  CHECK(r.errors[0].line == 1);
}

TEST_CASE("csv ingest mirrors the jsonl validations") {
  const std::string path = "tmp_posts.csv";
  write_text_file(path,
      "id,user_id,name,description,text,lat,lon,created_at\n"
      "1,u1,Ann Lee,planner,\"The bus, again\",41.5,-81.6,2020-05-01T12:00:00Z\n"
      "2,u2,Bob,,hi,oops,10.0,2020-05-01T12:00:00Z\n"
      ",u3,NoId,,x,0,0,2020-05-01T12:00:00Z\n"
      "3,u4,Carol,,ok,-10.0,170.0,2021-01-01T00:00:00Z\n");
  ParseResult r = parse_posts(path, Format::Csv);
  std::remove(path.c_str());

  REQUIRE(r.records.size() == 2);
  CHECK(r.records[0].post_id == "1");
  CHECK(r.records[0].text == "The bus, again");
  CHECK(r.records[1].post_id == "3");
  REQUIRE(r.errors.size() == 2);
  CHECK(r.errors[0].line == 3);  // non-numeric latitude
  CHECK(r.errors[1].line == 4);
  CHECK(r.errors[1].message == "empty post id");
}

TEST_CASE("csv ingest rejects a file without the expected columns") {
  const std::string path = "tmp_posts_bad.csv";
  write_text_file(path, "id,text\n1,hello\n");
  CHECK_THROWS_AS(parse_posts(path, Format::Csv), ConfigError);
  std::remove(path.c_str());
}

TEST_CASE("clean_text strips tags, urls and non-letters") {
  CHECK(clean_text("Hello, World! See https://x.co/a?b=1 <b>now</b>") == "hello world see now");
  CHECK(clean_text("covid-19 update: 5 buses") == "covid update buses");
  CHECK(clean_text("see www.example.com or HTTP://A.B today") == "see or today");
  CHECK(clean_text("  ") == "");
  CHECK(clean_text("<div class=\"x\">inner</div> after") == "inner after");
}

TEST_CASE("clean_text is idempotent") {
  const std::string nasty =
      "Mixed <a href='http://t.co/xyz'>CASE</a> text!! with www.urls.net and\n S#mb*ls 42";
  std::string once = clean_text(nasty);
  CHECK(clean_text(once) == once);
  CHECK(once == "mixed case text with and s mb ls");
}

TEST_CASE("tokenize drops stopwords") {
  std::set<std::string> stop{"the", "is"};
  auto toks = tokenize("the bus is late", stop);
  REQUIRE(toks.size() == 2);
  CHECK(toks[0] == "bus");
  CHECK(toks[1] == "late");
}

TEST_CASE("relevance filter requires keywords and matches any token") {
  TokenizedDoc doc{"1", {"bus", "late"}};
  std::set<std::string> kw{"bus", "transit"};
  CHECK(relevance_filter(doc, kw));
  CHECK_FALSE(relevance_filter(TokenizedDoc{"2", {"weather"}}, kw));
  CHECK_THROWS_AS(relevance_filter(doc, {}), ConfigError);
}

TEST_CASE("tokenize_posts parallel matches serial") {
  std::vector<PostRecord> posts;
  for (int i = 0; i < 500; ++i) {
    PostRecord p;
    p.post_id = std::to_string(i);
    p.text = "The Bus " + std::to_string(i) + " is <b>Late</b> http://x.co again";
    posts.push_back(p);
  }
  std::set<std::string> stop{"the", "is"};
  auto a = tokenize_posts_serial(posts, stop);
  auto b = tokenize_posts(posts, stop);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i].post_id == b[i].post_id);
    REQUIRE(a[i].tokens == b[i].tokens);
  }
  CHECK(a[0].tokens == std::vector<std::string>{"bus", "late", "again"});
}

TEST_CASE("display name splitting") {
  CHECK(first_name_of("Mary Jane Watson").value() == "Mary");
  CHECK(last_name_of("Mary Jane Watson").value() == "Watson");
  CHECK(first_name_of("Cher").value() == "Cher");
  CHECK_FALSE(last_name_of("Cher").has_value());
  CHECK_FALSE(first_name_of("   ").has_value());
  CHECK_FALSE(last_name_of("").has_value());
}
