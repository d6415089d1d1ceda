#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace geosensor {

/// Canonical text form used on both sides of every match: ASCII letters are
/// lowercased, everything except [a-z], space, ',' and ';' is deleted (bytes
/// outside ASCII included, so "München" becomes "mnchen"), whitespace runs
/// collapse to one space and the result is trimmed.
std::string normalize(std::string_view raw);

struct GazetteerEntry {
  std::string city_norm;  // empty for country / state centroid rows
  std::string country_norm;
  std::string country_code;  // ISO 3166-1 alpha-3
  std::optional<std::string> state_code;  // US only
  double lat = 0.0;
  double lon = 0.0;
  std::uint32_t population_rank = 0;  // 0 = unknown

  bool is_centroid() const { return city_norm.empty(); }
};

struct MatchResult {
  std::vector<std::size_t> city_hits;       // entry indices, ascending
  std::vector<std::string> country_hits;    // alpha-3 codes, ascending
  std::vector<std::string> state_hits;      // US postal codes, ascending
  // Tokens of the location not covered by any country or state match.
  // Zero means the string names only countries/states ("california, usa").
  std::size_t uncovered_tokens = 0;

  bool operator==(const MatchResult&) const = default;
};

struct LoadStats {
  std::size_t rows_read = 0;
  std::size_t bad_coordinate = 0;
  std::size_t rejected_other = 0;
};

class Gazetteer {
 public:
  Gazetteer();

  // Adds a row after normalizing its names. Returns false (and leaves the
  // index untouched) for out-of-range coordinates.
  bool add(std::string_view city, std::string_view country, std::string_view country_code,
           std::string_view state_code, double lat, double lon, std::uint32_t population_rank);

  const std::vector<GazetteerEntry>& entries() const { return entries_; }
  const GazetteerEntry& entry(std::size_t index) const { return entries_.at(index); }

  const std::vector<std::size_t>* find_city(std::string_view city_norm) const;
  std::optional<std::string> find_country(std::string_view country_norm) const;
  std::optional<std::string> find_state(std::string_view state_norm) const;

  bool has_country_code(std::string_view code) const;

  // Centroid row for a country, or for a US state when `state_code` is given.
  std::optional<std::size_t> centroid(std::string_view country_code,
                                      std::optional<std::string_view> state_code = std::nullopt) const;

  // Longest indexed name measured in tokens; bounds the n-gram scan.
  std::size_t max_name_tokens() const { return max_name_tokens_; }

  const LoadStats& load_stats() const { return stats_; }
  LoadStats& load_stats() { return stats_; }

 private:
  void index_name_length(std::string_view name);

  std::vector<GazetteerEntry> entries_;
  std::unordered_map<std::string, std::vector<std::size_t>> city_index_;
  std::unordered_map<std::string, std::string> country_index_;
  std::unordered_map<std::string, std::string> state_index_;
  std::size_t max_name_tokens_ = 1;
  LoadStats stats_;
};

// CSV header: city,country,country_code,state_code,lat,lon,population_rank
Gazetteer load_gazetteer(const std::filesystem::path& path);
Gazetteer parse_gazetteer(std::string_view csv_text, const std::filesystem::path& source = "<memory>");

MatchResult match_tokens(std::string_view loc_norm, const Gazetteer& gaz);

}  // namespace geosensor
