#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace geosensor::csv {

using Row = std::vector<std::string>;

/// A parsed CSV file: header line plus data rows. `line_numbers[i]` is the
/// 1-based source line of `rows[i]` for error messages.
struct Table {
  Row header;
  std::vector<Row> rows;
  std::vector<std::size_t> line_numbers;
};

// RFC 4180 subset: comma separator, double-quote quoting with "" escapes,
// LF or CRLF line ends. Blank lines are skipped.
Table parse(std::string_view text);

// Throws Error(MissingFile) when the file cannot be opened.
Table read_file(const std::filesystem::path& path);

// Throws Error(SchemaError) unless the header equals `expected` exactly.
void require_header(const Table& table, const Row& expected, const std::filesystem::path& source);

std::string quote_field(std::string_view field);
std::string format_row(const Row& row);

}  // namespace geosensor::csv
