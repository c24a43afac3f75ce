#include "civic/common.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <sys/stat.h>

namespace civic {

std::uint64_t fnv1a64(const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 14695981039346656037ull;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t fnv1a64_file(const std::string& path) {
  std::string content = read_text_file(path);
  return fnv1a64(content.data(), content.size());
}

std::string to_hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": not found");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw StageError(path + ": cannot open for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw StageError(path + ": write failed");
}

bool file_exists(const std::string& path) {
  struct stat st {};
  return ::stat(path.c_str(), &st) == 0;
}

std::vector<std::string> load_token_file(const std::string& path) {
  std::string content = read_text_file(path);
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&]() {
    // trim surrounding whitespace, lowercase
    std::size_t b = cur.find_first_not_of(" \t\r");
    std::size_t e = cur.find_last_not_of(" \t\r");
    if (b != std::string::npos) {
      std::string tok = cur.substr(b, e - b + 1);
      for (char& c : tok) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      out.push_back(tok);
    }
    cur.clear();
  };
  for (char c : content) {
    if (c == '\n')
      flush();
    else
      cur.push_back(c);
  }
  flush();
  return out;
}

double parse_double_strict(const std::string& s) {
  if (s.empty()) throw ConfigError("empty number");
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw ConfigError("bad number: '" + s + "'");
  }
  if (pos != s.size()) throw ConfigError("bad number: '" + s + "'");
  return v;
}

}  // namespace civic
