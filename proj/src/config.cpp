#include "civic/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "civic/common.hpp"

namespace civic::config {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

bool valid_key(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
    if (!ok) return false;
  }
  return true;
}

[[noreturn]] void fail(int line, const std::string& what) {
  throw ConfigError("config line " + std::to_string(line) + ": " + what);
}

// Parses a quoted string starting at s[i] == '"'; advances i past the close.
std::string parse_quoted(const std::string& s, std::size_t& i, int line) {
  std::string out;
  ++i;  // opening quote
  while (i < s.size()) {
    char c = s[i];
    if (c == '"') {
      ++i;
      return out;
    }
    if (c == '\\') {
      if (i + 1 >= s.size()) fail(line, "dangling escape in string");
      char e = s[i + 1];
      if (e == '"') out += '"';
      else if (e == '\\') out += '\\';
      else if (e == 'n') out += '\n';
      else if (e == 't') out += '\t';
      else fail(line, std::string("unsupported escape \\") + e);
      i += 2;
      continue;
    }
    out += c;
    ++i;
  }
  fail(line, "unterminated string");
}

void skip_spaces(const std::string& s, std::size_t& i) {
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\n' || s[i] == '\r')) ++i;
}

// True once a ']' appears outside any quoted string.
bool array_closed(const std::string& s) {
  bool in_str = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (in_str) {
      if (c == '\\') ++i;
      else if (c == '"') in_str = false;
      continue;
    }
    if (c == '"') in_str = true;
    else if (c == ']') return true;
  }
  return false;
}

// Cut a # comment that sits outside quoted strings.
std::string strip_comment(const std::string& s) {
  bool in_str = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (in_str) {
      if (c == '\\') ++i;
      else if (c == '"') in_str = false;
      continue;
    }
    if (c == '"') in_str = true;
    else if (c == '#') return s.substr(0, i);
  }
  return s;
}

bool rest_is_comment(const std::string& s, std::size_t i) {
  skip_spaces(s, i);
  return i >= s.size() || s[i] == '#';
}

bool parse_integer(const std::string& s, std::int64_t& out) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '+' || s[0] == '-') ? 1 : 0;
  if (i >= s.size()) return false;
  for (std::size_t j = i; j < s.size(); ++j)
    if (!std::isdigit(static_cast<unsigned char>(s[j]))) return false;
  try {
    out = std::stoll(s);
  } catch (const std::exception&) {
    return false;
  }
  return true;
}

bool parse_float(const std::string& s, double& out) {
  if (s.empty()) return false;
  std::size_t pos = 0;
  try {
    out = std::stod(s, &pos);
  } catch (const std::exception&) {
    return false;
  }
  return pos == s.size();
}

Table::Value parse_value(const std::string& raw, int line, bool lenient) {
  std::size_t i = 0;
  skip_spaces(raw, i);
  if (i >= raw.size()) fail(line, "missing value");
  if (raw[i] == '"') {
    std::string s = parse_quoted(raw, i, line);
    if (!rest_is_comment(raw, i)) fail(line, "trailing junk after string");
    return s;
  }
  if (raw[i] == '[') {
    ++i;
    std::vector<std::string> items;
    while (true) {
      skip_spaces(raw, i);
      if (i < raw.size() && raw[i] == ']') {
        ++i;
        break;
      }
      if (i >= raw.size() || raw[i] != '"') fail(line, "array elements must be quoted strings");
      items.push_back(parse_quoted(raw, i, line));
      skip_spaces(raw, i);
      if (i < raw.size() && raw[i] == ',') {
        ++i;
        continue;
      }
      if (i < raw.size() && raw[i] == ']') {
        ++i;
        break;
      }
      fail(line, "expected ',' or ']' in array");
    }
    if (!rest_is_comment(raw, i)) fail(line, "trailing junk after array");
    return items;
  }
  // bare scalar, cut at comment
  std::string bare = raw.substr(i);
  const auto hash = bare.find('#');
  if (hash != std::string::npos) bare = bare.substr(0, hash);
  bare = trim(bare);
  if (bare == "true") return true;
  if (bare == "false") return false;
  std::int64_t iv = 0;
  if (parse_integer(bare, iv)) return iv;
  double dv = 0.0;
  if (parse_float(bare, dv)) return dv;
  if (lenient) return bare;  // --set overrides take unquoted strings
  fail(line, "cannot parse value \"" + bare + "\"");
}

const char* kind_name(const Table::Value& v) {
  switch (v.index()) {
    case 0: return "string";
    case 1: return "integer";
    case 2: return "float";
    case 3: return "boolean";
    default: return "string array";
  }
}

}  // namespace

Table Table::parse(const std::string& text) {
  Table t;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    if (s[0] == '[') {
      if (s.back() != ']') fail(lineno, "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (!valid_key(section)) fail(lineno, "bad section name \"" + section + "\"");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) fail(lineno, "expected key = value");
    const std::string key = trim(s.substr(0, eq));
    if (!valid_key(key)) fail(lineno, "bad key \"" + key + "\"");
    const std::string full = section.empty() ? key : section + "." + key;
    if (t.values_.count(full)) fail(lineno, "duplicate key \"" + full + "\"");
    std::string value = s.substr(eq + 1);
    // arrays may span lines until the closing bracket
    if (trim(strip_comment(value)).rfind('[', 0) == 0) {
      const int start_line = lineno;
      std::string acc = strip_comment(value);
      while (!array_closed(acc)) {
        std::string cont;
        if (!std::getline(in, cont)) fail(start_line, "unterminated array");
        ++lineno;
        if (!cont.empty() && cont.back() == '\r') cont.pop_back();
        acc += "\n" + strip_comment(cont);
      }
      t.values_[full] = parse_value(acc, start_line, false);
      continue;
    }
    t.values_[full] = parse_value(value, lineno, false);
  }
  return t;
}

Table Table::parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file \"" + path + "\"");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

void Table::set_override(const std::string& dotted_key, const std::string& raw) {
  if (!valid_key(dotted_key)) throw ConfigError("bad override key \"" + dotted_key + "\"");
  values_[dotted_key] = parse_value(raw, 0, true);
}

bool Table::has(const std::string& key) const { return values_.count(key) != 0; }

const Table::Value& Table::at(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing config key \"" + key + "\"");
  return it->second;
}

std::string Table::get_string(const std::string& key) const {
  const Value& v = at(key);
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  throw ConfigError("config key \"" + key + "\" is a " + kind_name(v) + ", wanted string");
}

std::int64_t Table::get_int(const std::string& key) const {
  const Value& v = at(key);
  if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
  throw ConfigError("config key \"" + key + "\" is a " + kind_name(v) + ", wanted integer");
}

double Table::get_double(const std::string& key) const {
  const Value& v = at(key);
  if (const auto* d = std::get_if<double>(&v)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  throw ConfigError("config key \"" + key + "\" is a " + kind_name(v) + ", wanted number");
}

bool Table::get_bool(const std::string& key) const {
  const Value& v = at(key);
  if (const auto* b = std::get_if<bool>(&v)) return *b;
  throw ConfigError("config key \"" + key + "\" is a " + kind_name(v) + ", wanted boolean");
}

std::vector<std::string> Table::get_string_list(const std::string& key) const {
  const Value& v = at(key);
  if (const auto* l = std::get_if<std::vector<std::string>>(&v)) return *l;
  throw ConfigError("config key \"" + key + "\" is a " + kind_name(v) + ", wanted string array");
}

std::string Table::get_string_or(const std::string& key, const std::string& fallback) const {
  return has(key) ? get_string(key) : fallback;
}
std::int64_t Table::get_int_or(const std::string& key, std::int64_t fallback) const {
  return has(key) ? get_int(key) : fallback;
}
double Table::get_double_or(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}
bool Table::get_bool_or(const std::string& key, bool fallback) const {
  return has(key) ? get_bool(key) : fallback;
}
std::vector<std::string> Table::get_list_or(const std::string& key,
                                            const std::vector<std::string>& fallback) const {
  return has(key) ? get_string_list(key) : fallback;
}

std::vector<std::string> Table::keys() const {
  std::vector<std::string> out;
  out.reserve(values_.size());
  for (const auto& [k, v] : values_) out.push_back(k);
  return out;
}

std::vector<std::string> Table::keys_with_prefix(const std::string& prefix) const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_)
    if (k.rfind(prefix, 0) == 0) out.push_back(k);
  return out;
}

}  // namespace civic::config
