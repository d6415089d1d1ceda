#include "geosensor/gazetteer.hpp"

#include <algorithm>
#include <array>
#include <utility>

#include "geosensor/csv.hpp"
#include "geosensor/error.hpp"
#include "geosensor/io.hpp"

namespace geosensor {

namespace {

bool is_separator(char c) { return c == ' ' || c == ',' || c == ';'; }

bool is_alpha3(std::string_view code) {
  return code.size() == 3 && std::all_of(code.begin(), code.end(), [](char c) { return c >= 'A' && c <= 'Z'; });
}

bool is_state_code(std::string_view code) {
  return code.size() == 2 && std::all_of(code.begin(), code.end(), [](char c) { return c >= 'A' && c <= 'Z'; });
}

std::size_t count_tokens(std::string_view norm) {
  std::size_t n = 0;
  bool in_token = false;
  for (char c : norm) {
    bool sep = is_separator(c);
    if (!sep && !in_token) ++n;
    in_token = !sep;
  }
  return n;
}

// US state names for country-plus-state locations ("texas, usa").
constexpr std::array<std::pair<std::string_view, std::string_view>, 51> kUsStates{{
    {"alabama", "AL"},        {"alaska", "AK"},         {"arizona", "AZ"},        {"arkansas", "AR"},
    {"california", "CA"},     {"colorado", "CO"},       {"connecticut", "CT"},    {"delaware", "DE"},
    {"district of columbia", "DC"},                     {"florida", "FL"},        {"georgia", "GA"},
    {"hawaii", "HI"},         {"idaho", "ID"},          {"illinois", "IL"},       {"indiana", "IN"},
    {"iowa", "IA"},           {"kansas", "KS"},         {"kentucky", "KY"},       {"louisiana", "LA"},
    {"maine", "ME"},          {"maryland", "MD"},       {"massachusetts", "MA"},  {"michigan", "MI"},
    {"minnesota", "MN"},      {"mississippi", "MS"},    {"missouri", "MO"},       {"montana", "MT"},
    {"nebraska", "NE"},       {"nevada", "NV"},         {"new hampshire", "NH"},  {"new jersey", "NJ"},
    {"new mexico", "NM"},     {"new york", "NY"},       {"north carolina", "NC"}, {"north dakota", "ND"},
    {"ohio", "OH"},           {"oklahoma", "OK"},       {"oregon", "OR"},         {"pennsylvania", "PA"},
    {"rhode island", "RI"},   {"south carolina", "SC"}, {"south dakota", "SD"},   {"tennessee", "TN"},
    {"texas", "TX"},          {"utah", "UT"},           {"vermont", "VT"},        {"virginia", "VA"},
    {"washington", "WA"},     {"west virginia", "WV"},  {"wisconsin", "WI"},      {"wyoming", "WY"},
}};

}  // namespace

std::string normalize(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (unsigned char byte : raw) {
    char c = static_cast<char>(byte);
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f') {
      pending_space = !out.empty();
      continue;
    }
    if ((c >= 'a' && c <= 'z') || c == ',' || c == ';') {
      if (pending_space) out.push_back(' ');
      pending_space = false;
      out.push_back(c);
    }
  }
  return out;
}

Gazetteer::Gazetteer() {
  country_index_.emplace("usa", "USA");
  country_index_.emplace("uk", "GBR");
  for (auto [name, code] : kUsStates) {
    state_index_.emplace(std::string(name), std::string(code));
    index_name_length(name);
  }
}

void Gazetteer::index_name_length(std::string_view name) {
  max_name_tokens_ = std::max(max_name_tokens_, count_tokens(name));
}

bool Gazetteer::add(std::string_view city, std::string_view country, std::string_view country_code,
                    std::string_view state_code, double lat, double lon, std::uint32_t population_rank) {
  if (!(lat >= -90.0 && lat <= 90.0) || !(lon >= -180.0 && lon <= 180.0)) return false;

  GazetteerEntry entry;
  entry.city_norm = normalize(city);
  entry.country_norm = normalize(country);
  entry.country_code = std::string(country_code);
  if (!state_code.empty()) entry.state_code = std::string(state_code);
  entry.lat = lat;
  entry.lon = lon;
  entry.population_rank = population_rank;

  std::size_t index = entries_.size();
  if (!entry.city_norm.empty()) {
    city_index_[entry.city_norm].push_back(index);
    index_name_length(entry.city_norm);
  }
  if (!entry.country_norm.empty()) {
    country_index_.try_emplace(entry.country_norm, entry.country_code);
    index_name_length(entry.country_norm);
  }
  entries_.push_back(std::move(entry));
  return true;
}

const std::vector<std::size_t>* Gazetteer::find_city(std::string_view city_norm) const {
  auto it = city_index_.find(std::string(city_norm));
  return it == city_index_.end() ? nullptr : &it->second;
}

std::optional<std::string> Gazetteer::find_country(std::string_view country_norm) const {
  auto it = country_index_.find(std::string(country_norm));
  if (it == country_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> Gazetteer::find_state(std::string_view state_norm) const {
  auto it = state_index_.find(std::string(state_norm));
  if (it == state_index_.end()) return std::nullopt;
  return it->second;
}

bool Gazetteer::has_country_code(std::string_view code) const {
  if (code == "USA" || code == "GBR") return true;
  return std::any_of(entries_.begin(), entries_.end(), [&](const auto& e) { return e.country_code == code; });
}

std::optional<std::size_t> Gazetteer::centroid(std::string_view country_code,
                                               std::optional<std::string_view> state_code) const {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (!e.is_centroid() || e.country_code != country_code) continue;
    if (state_code) {
      if (e.state_code && *e.state_code == *state_code) return i;
    } else if (!e.state_code) {
      return i;
    }
  }
  return std::nullopt;
}

Gazetteer parse_gazetteer(std::string_view csv_text, const std::filesystem::path& source) {
  static const csv::Row kHeader{"city", "country", "country_code", "state_code", "lat", "lon", "population_rank"};
  csv::Table table = csv::parse(csv_text);
  csv::require_header(table, kHeader, source);

  Gazetteer gaz;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    ++gaz.load_stats().rows_read;
    auto lat = io::parse_double(row[4]);
    auto lon = io::parse_double(row[5]);
    auto rank = row[6].empty() ? std::optional<std::int64_t>{0} : io::parse_int(row[6]);
    std::string_view code = io::trim(row[2]);
    std::string_view state = io::trim(row[3]);

    bool valid = lat && lon && rank && *rank >= 0 && is_alpha3(code) && (state.empty() || is_state_code(state)) &&
                 (state.empty() || code == "USA") && !normalize(row[1]).empty();
    // A non-empty city that normalizes to nothing would masquerade as a centroid.
    if (valid && !io::trim(row[0]).empty() && normalize(row[0]).empty()) valid = false;
    if (!valid) {
      ++gaz.load_stats().rejected_other;
      continue;
    }
    if (!gaz.add(row[0], row[1], code, state, *lat, *lon, static_cast<std::uint32_t>(*rank))) {
      ++gaz.load_stats().bad_coordinate;
    }
  }
  return gaz;
}

Gazetteer load_gazetteer(const std::filesystem::path& path) { return parse_gazetteer(io::read_text(path), path); }

MatchResult match_tokens(std::string_view loc_norm, const Gazetteer& gaz) {
  struct Span {
    std::size_t begin;
    std::size_t end;
  };
  std::vector<Span> tokens;
  for (std::size_t i = 0; i < loc_norm.size();) {
    if (is_separator(loc_norm[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < loc_norm.size() && !is_separator(loc_norm[j])) ++j;
    tokens.push_back({i, j});
    i = j;
  }

  MatchResult result;
  std::vector<bool> covered(tokens.size(), false);
  const std::size_t width = gaz.max_name_tokens();

  for (std::size_t first = 0; first < tokens.size(); ++first) {
    for (std::size_t last = first; last < tokens.size() && last - first < width; ++last) {
      std::string_view phrase = loc_norm.substr(tokens[first].begin, tokens[last].end - tokens[first].begin);

      if (const auto* hits = gaz.find_city(phrase)) {
        result.city_hits.insert(result.city_hits.end(), hits->begin(), hits->end());
      }
      bool region_hit = false;
      if (auto code = gaz.find_country(phrase)) {
        // "uk" counts only after a comma or whitespace.
        std::size_t at = tokens[first].begin;
        bool allowed = phrase != "uk" || (at > 0 && (loc_norm[at - 1] == ',' || loc_norm[at - 1] == ' '));
        if (allowed) {
          result.country_hits.push_back(*code);
          region_hit = true;
        }
      }
      if (auto state = gaz.find_state(phrase)) {
        result.state_hits.push_back(*state);
        region_hit = true;
      }
      if (region_hit) std::fill(covered.begin() + first, covered.begin() + last + 1, true);
    }
  }

  auto sort_unique = [](auto& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  sort_unique(result.city_hits);
  sort_unique(result.country_hits);
  sort_unique(result.state_hits);
  result.uncovered_tokens = static_cast<std::size_t>(std::count(covered.begin(), covered.end(), false));
  return result;
}

}  // namespace geosensor
