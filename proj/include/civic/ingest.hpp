#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "civic/common.hpp"

namespace civic::ingest {

struct PostRecord {
  std::string post_id;
  std::string user_id;
  std::string display_name;
  std::string profile_description;
  std::string text;
  double latitude = 0.0;
  double longitude = 0.0;
  std::int64_t timestamp = 0;  // seconds since epoch, UTC
};

struct TokenizedDoc {
  std::string post_id;
  std::vector<std::string> tokens;
};

struct ParseResult {
  std::vector<PostRecord> records;
  std::vector<RecordError> errors;
};

enum class Format { Jsonl, Csv };

Format format_from_string(const std::string& s);

// "2020-03-19T14:02:11Z" -> epoch seconds. Throws ConfigError on junk.
std::int64_t parse_iso8601_utc(const std::string& s);
std::string format_iso8601_utc(std::int64_t t);

// Bad rows (malformed, out-of-range coordinates, duplicate ids) are collected
// in `errors`; good rows keep file order.
ParseResult parse_posts(const std::string& path, Format format);

// Strip HTML tags and URLs, drop everything that is not a letter or
// whitespace, lowercase, collapse runs of whitespace. Idempotent.
std::string clean_text(const std::string& raw);

std::vector<std::string> tokenize(const std::string& cleaned, const std::set<std::string>& stopwords);

// True iff the doc shares at least one token with `keywords`.
bool relevance_filter(const TokenizedDoc& doc, const std::set<std::string>& keywords);

// clean + tokenize for a whole corpus; parallel variant maps per record.
std::vector<TokenizedDoc> tokenize_posts_serial(const std::vector<PostRecord>& posts,
                                                const std::set<std::string>& stopwords);
std::vector<TokenizedDoc> tokenize_posts(const std::vector<PostRecord>& posts,
                                         const std::set<std::string>& stopwords);

// First / last whitespace token of a display name; empty optional when the
// name has no usable token (or only one, for last_name).
std::optional<std::string> first_name_of(const std::string& display_name);
std::optional<std::string> last_name_of(const std::string& display_name);

}  // namespace civic::ingest
