#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace civic {

// Bad user input: malformed files, impossible settings. CLI maps this to exit 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Unrecoverable failure inside a pipeline stage. CLI maps this to exit 1.
struct StageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One bad record in an otherwise usable file. Collected, never thrown.
struct RecordError {
  std::size_t line = 0;  // 1-based line (or row) number in the source file
  std::string message;
};

// FNV-1a, used for input digests in the run manifest.
std::uint64_t fnv1a64(const void* data, std::size_t len);
std::uint64_t fnv1a64_file(const std::string& path);
std::string to_hex(std::uint64_t v);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);
bool file_exists(const std::string& path);

// One lowercase token per line, blank lines skipped.
std::vector<std::string> load_token_file(const std::string& path);

// Whole-string numeric parse; trailing junk is an error.
double parse_double_strict(const std::string& s);

}  // namespace civic
