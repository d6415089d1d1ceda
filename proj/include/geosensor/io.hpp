#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace geosensor::io {

std::string read_text(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it over `path`, so readers
// never observe a partially written file.
void write_atomic(const std::filesystem::path& path, std::string_view contents);

// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

// Fixed-point with `digits` decimals, locale independent.
std::string format_fixed(double value, int digits);

std::optional<double> parse_double(std::string_view text);
std::optional<std::int64_t> parse_int(std::string_view text);

std::string_view trim(std::string_view text);

}  // namespace geosensor::io
