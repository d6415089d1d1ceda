#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "geosensor/burden.hpp"
#include "geosensor/geocoder.hpp"
#include "geosensor/tweet.hpp"

namespace geosensor {

struct CoverageStats {
  std::size_t papers_total = 0;
  std::size_t papers_tweeted = 0;
  double coverage_pct = 0.0;  // one decimal
  std::size_t tweets_total = 0;
  std::size_t tweets_with_location = 0;
  std::size_t tweets_resolved = 0;
  double resolved_pct_of_all = 0.0;  // one decimal
};

// Throws Error(UnknownPaperId) when a tweet cites an id outside `paper_ids`
// and Error(InvalidArgument) when resolved_count exceeds the located tweets.
CoverageStats compute_coverage(const std::set<std::string>& paper_ids, const std::vector<TweetRecord>& tweets,
                               std::size_t resolved_count);

// Paper ids, one per line; blank lines and '#' comments ignored.
std::set<std::string> load_paper_ids(const std::filesystem::path& path);

using PaperCounts = std::map<std::string, std::int64_t>;

// CSV header region_code,papers. Counts are whole-counted per region.
PaperCounts load_paper_counts(const std::filesystem::path& path);
PaperCounts parse_paper_counts(std::string_view csv_text, const std::filesystem::path& source = "<memory>");

struct RegionPanel {
  std::string region_code;
  std::int64_t tweets = 0;
  double burden = 0.0;
  std::int64_t papers = 0;

  bool operator==(const RegionPanel&) const = default;
};

struct PanelBuild {
  std::vector<RegionPanel> rows;  // sorted by region code
  std::map<std::string, std::int64_t> tweets_by_region;  // every region with >= 1 tweet
  std::size_t tweets_outside_scope = 0;  // non-US tweets in a us-state run, or US tweets without a state
  std::size_t excluded_no_burden = 0;    // regions with tweets but no burden
  std::size_t excluded_no_papers = 0;    // regions with tweets and burden but no paper count
  std::size_t tweets_in_excluded_regions = 0;
};

// Region key for a resolved location: country code, or the state code for
// us-state runs (empty when the location is out of scope).
std::string region_key(const ResolvedLocation& loc, RegionKind kind);

PanelBuild build_panel(const std::vector<ResolvedTweet>& resolved, const std::vector<BurdenValue>& burden,
                       const PaperCounts& papers, RegionKind kind);

// CSV header region_code,tweets,burden,papers.
std::string format_panel_csv(const std::vector<RegionPanel>& rows);
std::vector<RegionPanel> parse_panel_csv(std::string_view csv_text, const std::filesystem::path& source = "<memory>");

}  // namespace geosensor
