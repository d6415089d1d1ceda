#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "geosensor/gazetteer.hpp"
#include "geosensor/tweet.hpp"

namespace geosensor {

enum class Verdict { Kept, Excluded };
enum class FilterReason { Spurious, TooShort, NoWhitelistHit, Kept };

std::string_view to_string(FilterReason reason);

struct FilterDecision {
  Verdict verdict = Verdict::Excluded;
  FilterReason reason = FilterReason::TooShort;
  std::string loc_norm;
  std::optional<MatchResult> matched;  // present iff Kept

  bool kept() const { return verdict == Verdict::Kept; }
  bool operator==(const FilterDecision&) const = default;
};

/// Exclusion patterns. `raw_patterns` are searched in the untouched input
/// (ASCII case-folded) because normalization deletes characters such as
/// '&', ':' and '/'. `substrings` are searched in the normalized text.
struct ExclusionRules {
  std::vector<std::string> raw_patterns;
  std::vector<std::string> substrings;
  std::size_t min_chars_exclusive = 3;

  static ExclusionRules defaults();

  // Adds a pattern, routing it to the raw list when normalization would
  // alter it beyond case folding.
  void add_pattern(std::string_view pattern);
};

// One pattern per line; a line wrapped in double quotes keeps its
// surrounding spaces (" and "). Blank lines and '#' comments are ignored.
ExclusionRules load_exclusion_rules(const std::filesystem::path& path);

FilterDecision filter_location(std::string_view raw, const ExclusionRules& rules, const Gazetteer& gaz);

struct FilteredRecord {
  TweetRecord record;
  FilterDecision decision;
};

struct FilterTally {
  std::size_t spurious = 0;
  std::size_t too_short = 0;
  std::size_t no_whitelist_hit = 0;
  std::size_t kept = 0;

  std::size_t total() const { return spurious + too_short + no_whitelist_hit + kept; }
  void add(FilterReason reason);
  bool operator==(const FilterTally&) const = default;
};

struct FilterOutcome {
  std::vector<FilteredRecord> kept;
  std::vector<FilteredRecord> excluded;
  FilterTally tally;
};

// Records without a location are filtered as the empty string (TooShort).
FilterOutcome filter_corpus(const std::vector<TweetRecord>& records, const ExclusionRules& rules,
                            const Gazetteer& gaz);

}  // namespace geosensor
