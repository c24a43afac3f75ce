#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace civic::config {

// TOML subset: [section] headers, key = value lines, # comments. Values are
// quoted strings, integers, floats, booleans, or arrays of quoted strings.
// Keys flatten to "section.key". Later set_override() calls win over the file.
class Table {
 public:
  using Value = std::variant<std::string, std::int64_t, double, bool, std::vector<std::string>>;

  static Table parse(const std::string& text);
  static Table parse_file(const std::string& path);

  // dotted_key like "lda.topics"; raw is parsed with the same value grammar,
  // falling back to a plain string when nothing else matches.
  void set_override(const std::string& dotted_key, const std::string& raw);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  std::int64_t get_int(const std::string& key) const;
  double get_double(const std::string& key) const;  // accepts integer values
  bool get_bool(const std::string& key) const;
  std::vector<std::string> get_string_list(const std::string& key) const;

  std::string get_string_or(const std::string& key, const std::string& fallback) const;
  std::int64_t get_int_or(const std::string& key, std::int64_t fallback) const;
  double get_double_or(const std::string& key, double fallback) const;
  bool get_bool_or(const std::string& key, bool fallback) const;
  std::vector<std::string> get_list_or(const std::string& key,
                                       const std::vector<std::string>& fallback) const;

  std::vector<std::string> keys() const;          // sorted
  std::vector<std::string> keys_with_prefix(const std::string& prefix) const;

 private:
  const Value& at(const std::string& key) const;  // ConfigError when missing
  std::map<std::string, Value> values_;
};

}  // namespace civic::config
