// Deterministic generator for the bundled synthetic fixture: posts, name and
// category training data, block-group polygons and attributes, word lists and
// the pipeline config. Usage: make_fixture [output_dir]
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "civic/ingest.hpp"
#include "civic/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using civic::Rng;

namespace {

const std::vector<std::string> kFemaleFirst = {
    "amelia", "sophia", "olivia",   "emma",  "ava",    "mia",   "isabella", "luna",
    "aria",   "ella",   "nora",     "hazel", "violet", "stella", "clara",   "lucia",
    "elena",  "maya",   "zoe",      "lily",  "grace",  "chloe", "penelope", "layla",
    "gianna", "aurora", "savannah", "bella", "selena", "diana"};

const std::vector<std::string> kMaleFirst = {
    "james",  "liam",   "noah",   "oliver", "william", "henry", "jack",    "leo",
    "owen",   "ethan",  "lucas",  "mason",  "logan",   "david", "joseph",  "samuel",
    "john",   "robert", "thomas", "daniel", "matthew", "carter", "wyatt",  "luke",
    "dylan",  "victor", "edward", "frank",  "martin",  "oscar"};

struct RaceList {
  const char* label;
  std::vector<std::string> names;
};

const std::vector<RaceList> kRaceLists = {
    {"white",
     {"smith", "miller", "johnson", "brown", "jones", "davis", "wilson", "anderson", "taylor",
      "moore", "clark", "walker", "wright", "hall", "baker"}},
    {"black",
     {"washington", "jefferson", "banks", "booker", "freeman", "jackson", "gaines", "dorsey",
      "mosley", "battle", "merriweather", "okafor"}},
    {"asian",
     {"chen", "wang", "li", "zhang", "liu", "kim", "park", "nguyen", "tran", "patel", "yamamoto",
      "tanaka", "singh", "huang", "lin"}},
    {"hispanic",
     {"garcia", "martinez", "rodriguez", "lopez", "hernandez", "gonzalez", "perez", "sanchez",
      "ramirez", "torres", "flores", "rivera", "gomez", "diaz", "cruz"}}};

// word pools per category: 0 infrastructure, 1 disparity, 2 accessibility, 3 others
const std::vector<std::vector<std::string>> kPools = {
    {"bus", "train", "subway", "station", "transit", "rail", "schedule", "fare", "metro", "tram",
     "platform", "commute", "route", "line", "delay"},
    {"poverty", "inequality", "income", "rent", "wages", "jobs", "unemployment", "housing",
     "eviction", "wealth", "afford", "gap", "disparity", "neighborhood", "justice"},
    {"wheelchair", "ramp", "access", "sidewalk", "disability", "elevator", "crossing",
     "accessible", "curb", "cane", "braille", "mobility", "stroller", "handrail", "escalator"},
    {"weather", "coffee", "music", "game", "lunch", "party", "movie", "river", "park", "sunshine",
     "weekend", "festival", "recipe", "garden", "puppy"}};

const std::vector<std::string> kNeutralKeywords = {"city", "street", "road"};

const std::vector<std::pair<std::string, int>> kLexicon = {
    {"good", 1},     {"great", 2},    {"love", 2},     {"excellent", 2}, {"happy", 1},
    {"clean", 1},    {"fast", 1},     {"reliable", 2}, {"nice", 1},      {"wonderful", 2},
    {"helpful", 1},  {"safe", 1},     {"bad", -1},     {"terrible", -2}, {"hate", -2},
    {"awful", -2},   {"dirty", -1},   {"slow", -1},    {"broken", -2},   {"late", -1},
    {"crowded", -1}, {"worst", -2},   {"unsafe", -2},  {"noisy", -1}};

const std::vector<std::string> kStopwords = {
    "the", "a",  "an",  "and", "or",  "of",   "to",  "in",   "on",  "for", "with", "at",
    "by",  "is", "are", "was", "were", "be",  "been", "it",  "this", "that", "i",   "you",
    "we",  "they", "my", "our", "their", "not", "no", "so",  "too", "very", "just"};

// attribute bit patterns chosen so the block-group level design columns are
// linearly independent across the eleven matched groups
bool in_set(int i, std::initializer_list<int> s) {
  for (int v : s)
    if (v == i) return true;
  return false;
}

const int kTraffic[11] = {4, 27, 54, 70, 86, 13, 42, 72, 36, 44, 88};

std::string geoid_of(int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "1700310010%02d", i + 1);
  return std::string(buf);
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  if (!out) {
    std::fprintf(stderr, "cannot write %s\n", path.string().c_str());
    std::exit(1);
  }
}

json ring_json(const std::vector<std::pair<double, double>>& pts) {
  json ring = json::array();
  for (const auto& [lon, lat] : pts) ring.push_back({lon, lat});
  ring.push_back({pts[0].first, pts[0].second});  // close the ring
  return ring;
}

json square_ring(double lon0, double lat0, double w) {
  return ring_json({{lon0, lat0}, {lon0 + w, lat0}, {lon0 + w, lat0 + w}, {lon0, lat0 + w}});
}

// square s (0..11) sits on a 4x3 grid with 0.1 degree gaps
void square_origin(int s, double& lon0, double& lat0) {
  lon0 = -88.0 + (s % 4);
  lat0 = 41.0 + (s / 4);
}

std::string pick(Rng& rng, const std::vector<std::string>& pool) {
  return pool[rng.bounded(pool.size())];
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path out_dir = argc > 1 ? argv[1] : "fixtures";
  fs::create_directories(out_dir);
  Rng rng(20240501);

  // ---- word lists --------------------------------------------------------
  {
    std::string kw;
    for (int c = 0; c < 3; ++c)
      for (const auto& w : kPools[static_cast<std::size_t>(c)]) kw += w + "\n";
    for (const auto& w : kNeutralKeywords) kw += w + "\n";
    write_file(out_dir / "keywords.txt", kw);

    std::string sw = "# tokens dropped before any modeling\n";
    for (const auto& w : kStopwords) sw += w + "\n";
    write_file(out_dir / "stopwords.txt", sw);

    std::string lex = "word,polarity\n";
    for (const auto& [w, p] : kLexicon) lex += w + "," + std::to_string(p) + "\n";
    write_file(out_dir / "lexicon.csv", lex);
  }

  // ---- name training data ------------------------------------------------
  {
    std::string g = "name,label\n";
    for (const auto& n : kFemaleFirst) g += n + ",F\n";
    for (const auto& n : kMaleFirst) g += n + ",M\n";
    write_file(out_dir / "names_gender.csv", g);

    std::string r = "name,label\n";
    for (const auto& list : kRaceLists)
      for (const auto& n : list.names) r += n + "," + list.label + "\n";
    write_file(out_dir / "names_race.csv", r);
  }

  // ---- labeled category examples ----------------------------------------
  {
    std::string csv = "text,label\n";
    for (int c = 0; c < 4; ++c) {
      for (int k = 0; k < 40; ++k) {
        std::string text;
        for (int w = 0; w < 5; ++w) {
          if (w) text += " ";
          text += pick(rng, kPools[static_cast<std::size_t>(c)]);
        }
        csv += "\"" + text + "\"," + std::to_string(c) + "\n";
      }
    }
    write_file(out_dir / "labeled_categories.csv", csv);
  }

  // ---- block-group polygons and attributes -------------------------------
  {
    json features = json::array();
    for (int s = 0; s < 12; ++s) {
      double lon0 = 0, lat0 = 0;
      square_origin(s, lon0, lat0);
      json geometry;
      if (s == 4) {
        // square with a central hole; points in the hole are outside
        json rings = json::array();
        rings.push_back(square_ring(lon0, lat0, 0.9));
        rings.push_back(ring_json({{lon0 + 0.35, lat0 + 0.35},
                                   {lon0 + 0.55, lat0 + 0.35},
                                   {lon0 + 0.55, lat0 + 0.55},
                                   {lon0 + 0.35, lat0 + 0.55}}));
        geometry = {{"type", "Polygon"}, {"coordinates", rings}};
      } else if (s == 10) {
        // two disjoint parts sharing one geoid
        json part_a = json::array();
        part_a.push_back(square_ring(lon0, lat0, 0.4));
        json part_b = json::array();
        part_b.push_back(square_ring(lon0 + 0.5, lat0, 0.4));
        geometry = {{"type", "MultiPolygon"}, {"coordinates", json::array({part_a, part_b})}};
      } else {
        json rings = json::array();
        rings.push_back(square_ring(lon0, lat0, 0.9));
        geometry = {{"type", "Polygon"}, {"coordinates", rings}};
      }
      features.push_back({{"type", "Feature"},
                          {"properties", {{"GEOID", geoid_of(s)}}},
                          {"geometry", geometry}});
    }
    json fc{{"type", "FeatureCollection"}, {"features", features}};
    write_file(out_dir / "block_groups.geojson", fc.dump(2) + "\n");

    // attributes cover squares 0..10 only; square 11 joins fail on purpose
    std::string csv =
        "geoid,per_capita_income,median_income,percent_unemployed,poverty_rate,"
        "mean_travel_time,hs_completion,pm25_pctile,diesel_pctile,traffic_pctile,"
        "agri_loss_pctile,building_loss_pctile,energy_burden_pctile,disadvantaged,"
        "low_income_nonstudent\n";
    for (int i = 0; i < 11; ++i) {
      char row[512];
      std::snprintf(row, sizeof(row), "%s,%d,%d,%.1f,%.1f,%.1f,%.1f,%d,%d,%d,%d,%d,%d,%d,%d\n",
                    geoid_of(i).c_str(), 18000 + 900 * i, 20000 + 3500 * i, 1.0 + 0.8 * i,
                    22.0 - 1.5 * i, 18.0 + 1.7 * i, 75.0 + 2.0 * i,
                    in_set(i, {0, 1, 2, 4, 5, 6, 7, 9, 10}) ? 70 : 30,
                    in_set(i, {2, 3, 4, 5, 6, 8}) ? 70 : 30, kTraffic[i],
                    in_set(i, {1, 2, 7, 8, 10}) ? 70 : 30,
                    in_set(i, {1, 3, 5, 7, 9, 10}) ? 70 : 30,
                    in_set(i, {1, 3, 4, 8}) ? 70 : 30,
                    in_set(i, {0, 1, 6, 8, 10}) ? 1 : 0, in_set(i, {1, 2, 3}) ? 1 : 0);
      csv += row;
    }
    write_file(out_dir / "block_attrs.csv", csv);
  }

  // ---- posts -------------------------------------------------------------
  {
    std::string jsonl;
    const std::int64_t base_ts = civic::ingest::parse_iso8601_utc("2020-05-01T00:00:00Z");
    int line_no = 0;
    for (int i = 0; i < 2000; ++i, ++line_no) {
      // category mix: ~27% each for 0..2, ~19% others
      const std::size_t draw = rng.bounded(100);
      const int cat = draw < 27 ? 0 : draw < 54 ? 1 : draw < 81 ? 2 : 3;

      std::string text;
      const std::size_t words = 4 + rng.bounded(4);
      for (std::size_t w = 0; w < words; ++w) {
        if (w) text += " ";
        text += pick(rng, kPools[static_cast<std::size_t>(cat)]);
      }
      const bool irrelevant = rng.bounded(100) < 2;  // no keyword at all
      if (cat == 3 && !irrelevant) text += " " + kNeutralKeywords[rng.bounded(3)];
      // sentiment flavoring
      const std::size_t sdraw = rng.bounded(10);
      if (sdraw < 3) text += " " + kLexicon[rng.bounded(12)].first;            // positive
      else if (sdraw < 6) text += " " + kLexicon[12 + rng.bounded(12)].first;  // negative
      text += " the to and";  // stopword chaff

      // location
      double lat = 0, lon = 0;
      const std::size_t where = rng.bounded(1000);
      if (where < 830) {  // inside a matched square
        const int s = static_cast<int>(rng.bounded(11));
        double lon0 = 0, lat0 = 0;
        square_origin(s, lon0, lat0);
        if (s == 10) {
          const double off = rng.bounded(2) ? 0.5 : 0.0;  // either part
          lon = lon0 + off + 0.05 + rng.uniform() * 0.3;
          lat = lat0 + 0.05 + rng.uniform() * 0.3;
        } else {
          lon = lon0 + 0.05 + rng.uniform() * 0.8;
          lat = lat0 + 0.05 + rng.uniform() * 0.8;
          if (s == 4) {  // keep clear of the hole
            while (lon > lon0 + 0.3 && lon < lon0 + 0.6 && lat > lat0 + 0.3 && lat < lat0 + 0.6) {
              lon = lon0 + 0.05 + rng.uniform() * 0.8;
              lat = lat0 + 0.05 + rng.uniform() * 0.8;
            }
          }
        }
      } else if (where < 860) {  // square 11: polygon exists, attributes do not
        double lon0 = 0, lat0 = 0;
        square_origin(11, lon0, lat0);
        lon = lon0 + 0.05 + rng.uniform() * 0.8;
        lat = lat0 + 0.05 + rng.uniform() * 0.8;
      } else if (where < 875) {  // inside square 4's hole: outside by even-odd
        double lon0 = 0, lat0 = 0;
        square_origin(4, lon0, lat0);
        lon = lon0 + 0.40 + rng.uniform() * 0.10;
        lat = lat0 + 0.40 + rng.uniform() * 0.10;
      } else {  // gaps between squares or far away
        if (rng.bounded(2)) {
          const int s = static_cast<int>(rng.bounded(12));
          double lon0 = 0, lat0 = 0;
          square_origin(s, lon0, lat0);
          lon = lon0 + 0.95;
          lat = lat0 + 0.45 + rng.uniform() * 0.1;
        } else {
          lon = -70.0 - rng.uniform() * 5.0;
          lat = 35.0 + rng.uniform() * 3.0;
        }
      }

      // display name
      std::string display;
      const std::size_t ndraw = rng.bounded(100);
      const bool female = rng.bounded(2) == 1;
      const std::string first = female ? kFemaleFirst[rng.bounded(kFemaleFirst.size())]
                                       : kMaleFirst[rng.bounded(kMaleFirst.size())];
      if (ndraw < 4) {
        display = "9点9";  // no usable letters: demographics stay unknown
      } else if (ndraw < 10) {
        display = first;  // single token: no last name, race unknown
      } else {
        const auto& list = kRaceLists[rng.bounded(kRaceLists.size())];
        display = first + " " + list.names[rng.bounded(list.names.size())];
      }

      char id[16];
      std::snprintf(id, sizeof(id), "t%06d", i);
      json j{{"id", id},
             {"user_id", std::string("u") + std::to_string(1000 + i)},
             {"name", display},
             {"description", "synthetic fixture account"},
             {"text", irrelevant ? "sunshine puppy recipe garden" : text},
             {"lat", lat},
             {"lon", lon},
             {"created_at", civic::ingest::format_iso8601_utc(base_ts + 137 * i)}};
      jsonl += j.dump() + "\n";

      // sprinkle malformed rows at fixed positions
      if (i == 250) {
        json bad = j;
        bad["id"] = "bad-lat";
        bad["lat"] = 95.0;
        jsonl += bad.dump() + "\n";
      } else if (i == 500) {
        json bad = j;
        bad["id"] = "bad-lon";
        bad["lon"] = 200.0;
        jsonl += bad.dump() + "\n";
      } else if (i == 750) {
        jsonl += j.dump() + "\n";  // duplicate id
      } else if (i == 1000) {
        jsonl += "{not json at all\n";
      } else if (i == 1250) {
        json bad = j;
        bad.erase("text");
        bad["id"] = "no-text";
        jsonl += bad.dump() + "\n";
      }
    }
    write_file(out_dir / "posts.jsonl", jsonl);
  }

  // ---- pipeline config ---------------------------------------------------
  {
    std::string toml = R"([paths]
posts = "posts.jsonl"
names_gender = "names_gender.csv"
names_race = "names_race.csv"
polygons = "block_groups.geojson"
attributes = "block_attrs.csv"
keywords = "keywords.txt"
stopwords = "stopwords.txt"
lexicon = "lexicon.csv"
labeled_categories = "labeled_categories.csv"
out_dir = "out"

[seeds]
demographics = 13
topics = 7
classifier = 11

[lda]
topics = 4
iterations = 150
alpha = 0.5
beta = 0.01
min_doc_freq = 2
top_words = 10

[demographics]
gender_algorithm = "naive_bayes"
race_algorithm = "naive_bayes"

[models.accessibility]
outcome = 2
features = [
  "Female (1=Female, 0=Other)|dummy:female",
  "Race: White (1=White, 0=Other)|dummy:white",
  "Race: Asian (1=Asian, 0=Other)|dummy:asian",
  "Sentiment: Neutral|dummy:neutral",
  "Sentiment: Negative|dummy:negative",
  "Percent unemployed greater than 5.5 (%)|gt:percent_unemployed:5.5",
  "Median Income more than 50,000 ($) (1=Yes, 0=No)|gt:median_income:50000",
  "Identified as disadvantaged (1=Yes, 0=No)|gt:disadvantaged:0.5",
  "Traffic proximity and volume (percentile)|scale:traffic_pctile:100",
  "Expected agricultural loss rate (1=Yes, 0=No)|gt:agri_loss_pctile:50",
  "Expected building loss rate (1=Yes, 0=No)|gt:building_loss_pctile:50",
  "Energy burden (1=Yes, 0=No)|gt:energy_burden_pctile:50",
  "PM2.5 in the air (1=Yes, 0=No)|gt:pm25_pctile:50",
  "Diesel particulate matter exposure (1=Yes, 0=No)|gt:diesel_pctile:50",
  "Is low income non-student (1=Yes, 0=No)|gt:low_income_nonstudent:0.5"
]

[models.disparity]
outcome = 1
features = [
  "Female (1=Female, 0=Other)|dummy:female",
  "Race: White (1=White, 0=Other)|dummy:white",
  "Race: Asian (1=Asian, 0=Other)|dummy:asian",
  "Sentiment: Neutral|dummy:neutral",
  "Sentiment: Negative|dummy:negative",
  "Percent unemployed greater than 5.5 (%)|gt:percent_unemployed:5.5",
  "Median Income more than 50,000 ($) (1=Yes, 0=No)|gt:median_income:50000",
  "Identified as disadvantaged (1=Yes, 0=No)|gt:disadvantaged:0.5",
  "Traffic proximity and volume (percentile)|scale:traffic_pctile:100",
  "Expected agricultural loss rate (1=Yes, 0=No)|gt:agri_loss_pctile:50",
  "Expected building loss rate (1=Yes, 0=No)|gt:building_loss_pctile:50",
  "Energy burden (1=Yes, 0=No)|gt:energy_burden_pctile:50",
  "PM2.5 in the air (1=Yes, 0=No)|gt:pm25_pctile:50",
  "Diesel particulate matter exposure (1=Yes, 0=No)|gt:diesel_pctile:50"
]

[models.infrastructure]
outcome = 0
features = [
  "Female (1=Female, 0=Other)|dummy:female",
  "Race: White (1=White, 0=Other)|dummy:white",
  "Race: Asian (1=Asian, 0=Other)|dummy:asian",
  "Sentiment: Neutral|dummy:neutral",
  "Percent unemployed greater than 5.5 (%)|gt:percent_unemployed:5.5",
  "Median Income more than 50,000 ($) (1=Yes, 0=No)|gt:median_income:50000",
  "Identified as disadvantaged (1=Yes, 0=No)|gt:disadvantaged:0.5",
  "Expected agricultural loss rate (1=Yes, 0=No)|gt:agri_loss_pctile:50",
  "PM2.5 in the air (1=Yes, 0=No)|gt:pm25_pctile:50",
  "Diesel particulate matter exposure (1=Yes, 0=No)|gt:diesel_pctile:50"
]
)";
    write_file(out_dir / "config.toml", toml);
  }

  std::printf("fixture written to %s\n", out_dir.string().c_str());
  return 0;
}
