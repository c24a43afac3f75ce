#include "civic/ingest.hpp"

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "civic/csv.hpp"
#include "civic/parallel.hpp"

namespace civic::ingest {

using nlohmann::json;

Format format_from_string(const std::string& s) {
  if (s == "jsonl") return Format::Jsonl;
  if (s == "csv") return Format::Csv;
  throw ConfigError("unknown posts format: " + s);
}

std::int64_t parse_iso8601_utc(const std::string& s) {
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
  int n = std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d", &y, &mo, &d, &h, &mi, &sec);
  if (n != 6) n = std::sscanf(s.c_str(), "%4d-%2d-%2d %2d:%2d:%2d", &y, &mo, &d, &h, &mi, &sec);
  if (n != 6 || mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || sec > 60)
    throw ConfigError("bad ISO-8601 timestamp: " + s);
  std::tm tm{};
  tm.tm_year = y - 1900;
  tm.tm_mon = mo - 1;
  tm.tm_mday = d;
  tm.tm_hour = h;
  tm.tm_min = mi;
  tm.tm_sec = sec;
  return static_cast<std::int64_t>(timegm(&tm));
}

std::string format_iso8601_utc(std::int64_t t) {
  std::time_t tt = static_cast<std::time_t>(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace {

const char* kFields[] = {"id", "user_id", "name", "description", "text", "lat", "lon", "created_at"};

std::string json_string_field(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  throw ConfigError(std::string("field '") + key + "' is not a string");
}

// Returns an error message, or empty on success.
std::string validate_and_append(PostRecord rec, std::vector<PostRecord>& out,
                                std::unordered_set<std::string>& seen_ids) {
  if (rec.post_id.empty()) return "empty post id";
  if (rec.latitude < -90.0 || rec.latitude > 90.0) return "latitude out of range";
  if (rec.longitude < -180.0 || rec.longitude > 180.0) return "longitude out of range";
  if (!seen_ids.insert(rec.post_id).second) return "duplicate post id \"" + rec.post_id + "\"";
  out.push_back(std::move(rec));
  return {};
}

void parse_jsonl(const std::string& content, ParseResult& result) {
  std::unordered_set<std::string> seen_ids;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string::npos) end = content.size();
    ++line_no;
    std::string line = content.substr(start, end - start);
    start = end + 1;
    if (end == content.size() && line.empty()) break;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      json j = json::parse(line);
      PostRecord rec;
      rec.post_id = json_string_field(j, "id");
      rec.user_id = json_string_field(j, "user_id");
      rec.display_name = j.at("name").get<std::string>();
      rec.profile_description = j.at("description").get<std::string>();
      rec.text = j.at("text").get<std::string>();
      rec.latitude = j.at("lat").get<double>();
      rec.longitude = j.at("lon").get<double>();
      rec.timestamp = parse_iso8601_utc(j.at("created_at").get<std::string>());
      std::string err = validate_and_append(std::move(rec), result.records, seen_ids);
      if (!err.empty()) result.errors.push_back({line_no, err});
    } catch (const std::exception& e) {
      result.errors.push_back({line_no, e.what()});
    }
    if (end == content.size()) break;
  }
}

void parse_csv_posts(const std::string& content, ParseResult& result) {
  auto rows = csv::parse(content);
  if (rows.empty()) throw ConfigError("posts csv: empty file");
  std::unordered_map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < rows[0].size(); ++i) col[rows[0][i]] = i;
  for (const char* f : kFields)
    if (!col.count(f)) throw ConfigError(std::string("posts csv: missing column '") + f + "'");

  std::unordered_set<std::string> seen_ids;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::size_t line_no = r + 1;  // header is line 1
    if (row.size() < rows[0].size()) {
      result.errors.push_back({line_no, "too few fields"});
      continue;
    }
    try {
      PostRecord rec;
      rec.post_id = row[col["id"]];
      rec.user_id = row[col["user_id"]];
      rec.display_name = row[col["name"]];
      rec.profile_description = row[col["description"]];
      rec.text = row[col["text"]];
      rec.latitude = std::stod(row[col["lat"]]);
      rec.longitude = std::stod(row[col["lon"]]);
      rec.timestamp = parse_iso8601_utc(row[col["created_at"]]);
      std::string err = validate_and_append(std::move(rec), result.records, seen_ids);
      if (!err.empty()) result.errors.push_back({line_no, err});
    } catch (const std::exception& e) {
      result.errors.push_back({line_no, e.what()});
    }
  }
}

}  // namespace

ParseResult parse_posts(const std::string& path, Format format) {
  std::string content = read_text_file(path);
  ParseResult result;
  if (format == Format::Jsonl)
    parse_jsonl(content, result);
  else
    parse_csv_posts(content, result);
  return result;
}

std::string clean_text(const std::string& raw) {
  std::string s;
  s.reserve(raw.size());

  // HTML tags -> space
  bool in_tag = false;
  for (char c : raw) {
    if (c == '<') {
      in_tag = true;
    } else if (c == '>' && in_tag) {
      in_tag = false;
      s.push_back(' ');
    } else if (!in_tag) {
      s.push_back(c);
    }
  }

  // URLs: drop whitespace-delimited tokens starting http://, https://, www.
  std::string no_urls;
  std::size_t i = 0;
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; };
  while (i < s.size()) {
    if (is_space(s[i])) {
      no_urls.push_back(s[i]);
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < s.size() && !is_space(s[j])) ++j;
    std::string tok = s.substr(i, j - i);
    std::string low = tok;
    for (char& c : low) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    bool url = low.rfind("http://", 0) == 0 || low.rfind("https://", 0) == 0 ||
               low.rfind("www.", 0) == 0;
    if (!url) no_urls += tok;
    no_urls.push_back(' ');
    i = j;
  }

  // letters only, lowercased; everything else becomes a separator
  std::string cleaned;
  bool pending_space = false;
  for (char c : no_urls) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    if (c >= 'a' && c <= 'z') {
      if (pending_space && !cleaned.empty()) cleaned.push_back(' ');
      pending_space = false;
      cleaned.push_back(c);
    } else {
      pending_space = true;
    }
  }
  return cleaned;
}

std::vector<std::string> tokenize(const std::string& cleaned, const std::set<std::string>& stopwords) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < cleaned.size()) {
    while (i < cleaned.size() && cleaned[i] == ' ') ++i;
    std::size_t j = i;
    while (j < cleaned.size() && cleaned[j] != ' ') ++j;
    if (j > i) {
      std::string tok = cleaned.substr(i, j - i);
      bool alpha = std::all_of(tok.begin(), tok.end(), [](char c) { return c >= 'a' && c <= 'z'; });
      if (alpha && !stopwords.count(tok)) tokens.push_back(std::move(tok));
    }
    i = j;
  }
  return tokens;
}

bool relevance_filter(const TokenizedDoc& doc, const std::set<std::string>& keywords) {
  if (keywords.empty()) throw ConfigError("relevance filter: empty keyword set");
  return std::any_of(doc.tokens.begin(), doc.tokens.end(),
                     [&](const std::string& t) { return keywords.count(t) > 0; });
}

std::vector<TokenizedDoc> tokenize_posts_serial(const std::vector<PostRecord>& posts,
                                                const std::set<std::string>& stopwords) {
  std::vector<TokenizedDoc> docs(posts.size());
  for (std::size_t i = 0; i < posts.size(); ++i)
    docs[i] = {posts[i].post_id, tokenize(clean_text(posts[i].text), stopwords)};
  return docs;
}

std::vector<TokenizedDoc> tokenize_posts(const std::vector<PostRecord>& posts,
                                         const std::set<std::string>& stopwords) {
  std::vector<TokenizedDoc> docs(posts.size());
  par::parallel_for(posts.size(), [&](std::size_t i) {
    docs[i] = {posts[i].post_id, tokenize(clean_text(posts[i].text), stopwords)};
  });
  return docs;
}

namespace {
std::vector<std::string> whitespace_split(const std::string& s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}
}  // namespace

std::optional<std::string> first_name_of(const std::string& display_name) {
  auto parts = whitespace_split(display_name);
  if (parts.empty()) return std::nullopt;
  return parts.front();
}

std::optional<std::string> last_name_of(const std::string& display_name) {
  auto parts = whitespace_split(display_name);
  if (parts.size() < 2) return std::nullopt;
  return parts.back();
}

}  // namespace civic::ingest
