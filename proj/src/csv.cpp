#include "geosensor/csv.hpp"

#include "geosensor/error.hpp"
#include "geosensor/io.hpp"

namespace geosensor::csv {

Table parse(std::string_view text) {
  Table table;
  Row row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  bool have_header = false;
  std::size_t line = 1;
  std::size_t row_line = 1;

  auto end_row = [&] {
    bool blank = row.empty() && field.empty() && !field_started;
    if (!blank) {
      row.push_back(std::move(field));
      if (!have_header) {
        table.header = std::move(row);
        have_header = true;
      } else {
        table.rows.push_back(std::move(row));
        table.line_numbers.push_back(row_line);
      }
    }
    row.clear();
    field.clear();
    field_started = false;
  };

  // Skip a UTF-8 byte order mark.
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        field_started = true;
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') break;
        field.push_back(c);
        break;
      case '\n':
        end_row();
        ++line;
        row_line = line;
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (in_quotes) throw Error(ErrorKind::SchemaError, "unterminated quoted field at line " + std::to_string(row_line));
  end_row();
  return table;
}

Table read_file(const std::filesystem::path& path) { return parse(io::read_text(path)); }

void require_header(const Table& table, const Row& expected, const std::filesystem::path& source) {
  if (table.header != expected) {
    std::string want;
    for (std::size_t i = 0; i < expected.size(); ++i) want += (i ? "," : "") + expected[i];
    throw Error(ErrorKind::SchemaError, source.string() + ": expected header '" + want + "'");
  }
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    if (table.rows[i].size() != expected.size()) {
      throw Error(ErrorKind::SchemaError, source.string() + ":" + std::to_string(table.line_numbers[i]) + ": expected " +
                                              std::to_string(expected.size()) + " fields, got " +
                                              std::to_string(table.rows[i].size()));
    }
  }
}

std::string quote_field(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += '"';
  return out;
}

std::string format_row(const Row& row) {
  std::string out;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out += ',';
    out += quote_field(row[i]);
  }
  out += '\n';
  return out;
}

}  // namespace geosensor::csv
