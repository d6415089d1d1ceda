#include "geosensor/location_filter.hpp"

#include <algorithm>
#include <sstream>

#include "geosensor/error.hpp"
#include "geosensor/io.hpp"

namespace geosensor {

namespace {

std::string ascii_lower(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

bool normalizable(std::string_view pattern) {
  return std::all_of(pattern.begin(), pattern.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == ' ' || c == ',' || c == ';';
  });
}

}  // namespace

std::string_view to_string(FilterReason reason) {
  switch (reason) {
    case FilterReason::Spurious: return "Spurious";
    case FilterReason::TooShort: return "TooShort";
    case FilterReason::NoWhitelistHit: return "NoWhitelistHit";
    case FilterReason::Kept: return "Kept";
  }
  return "Unknown";
}

ExclusionRules ExclusionRules::defaults() {
  ExclusionRules rules;
  for (std::string_view p : {"www", "http", "not from", "worldwide", "everywhere", "mostly nucleus", "bcnvcia", "&",
                             " and ", " und ", " y "}) {
    rules.add_pattern(p);
  }
  // URL markers are also caught before normalization strips ':' and '/'.
  rules.raw_patterns.insert(rules.raw_patterns.end(), {"www", "http"});
  return rules;
}

void ExclusionRules::add_pattern(std::string_view pattern) {
  if (pattern.empty()) return;
  if (normalizable(pattern)) substrings.push_back(ascii_lower(pattern));
  else raw_patterns.push_back(ascii_lower(pattern));
}

ExclusionRules load_exclusion_rules(const std::filesystem::path& path) {
  std::istringstream in(io::read_text(path));
  ExclusionRules rules;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string_view trimmed = io::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    if (trimmed.size() >= 2 && trimmed.front() == '"' && trimmed.back() == '"') {
      trimmed = trimmed.substr(1, trimmed.size() - 2);
    }
    rules.add_pattern(trimmed);
  }
  return rules;
}

FilterDecision filter_location(std::string_view raw, const ExclusionRules& rules, const Gazetteer& gaz) {
  FilterDecision decision;
  decision.verdict = Verdict::Excluded;

  const std::string folded = ascii_lower(raw);
  for (const auto& p : rules.raw_patterns) {
    if (folded.find(p) != std::string::npos) {
      decision.reason = FilterReason::Spurious;
      decision.loc_norm = normalize(raw);
      return decision;
    }
  }

  decision.loc_norm = normalize(raw);
  const std::string& norm = decision.loc_norm;
  for (const auto& p : rules.substrings) {
    if (norm.find(p) != std::string::npos) {
      decision.reason = FilterReason::Spurious;
      return decision;
    }
  }

  if (norm.size() <= rules.min_chars_exclusive) {
    decision.reason = FilterReason::TooShort;
    return decision;
  }

  MatchResult match = match_tokens(norm, gaz);
  bool country_level = match.uncovered_tokens == 0;
  if (match.country_hits.empty() || (match.city_hits.empty() && !country_level)) {
    decision.reason = FilterReason::NoWhitelistHit;
    return decision;
  }

  decision.verdict = Verdict::Kept;
  decision.reason = FilterReason::Kept;
  decision.matched = std::move(match);
  return decision;
}

void FilterTally::add(FilterReason reason) {
  switch (reason) {
    case FilterReason::Spurious: ++spurious; break;
    case FilterReason::TooShort: ++too_short; break;
    case FilterReason::NoWhitelistHit: ++no_whitelist_hit; break;
    case FilterReason::Kept: ++kept; break;
  }
}

FilterOutcome filter_corpus(const std::vector<TweetRecord>& records, const ExclusionRules& rules,
                            const Gazetteer& gaz) {
  FilterOutcome out;
  for (const auto& record : records) {
    FilterDecision decision = filter_location(record.raw_location.value_or(""), rules, gaz);
    out.tally.add(decision.reason);
    auto& part = decision.kept() ? out.kept : out.excluded;
    part.push_back({record, std::move(decision)});
  }
  return out;
}

}  // namespace geosensor
