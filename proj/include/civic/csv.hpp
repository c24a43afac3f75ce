#pragma once

#include <string>
#include <vector>

namespace civic::csv {

using Row = std::vector<std::string>;

// RFC 4180 style: quoted fields may contain commas, doubled quotes and
// newlines. Rows are returned including the header row.
std::vector<Row> parse(const std::string& content);
std::vector<Row> parse_file(const std::string& path);

std::string escape(const std::string& field);
std::string join_row(const Row& row);

}  // namespace civic::csv
