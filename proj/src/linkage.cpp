#include "geosensor/linkage.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_set>

#include "geosensor/csv.hpp"
#include "geosensor/error.hpp"
#include "geosensor/io.hpp"
#include "geosensor/percent.hpp"

namespace geosensor {

CoverageStats compute_coverage(const std::set<std::string>& paper_ids, const std::vector<TweetRecord>& tweets,
                               std::size_t resolved_count) {
  CoverageStats stats;
  stats.papers_total = paper_ids.size();
  stats.tweets_total = tweets.size();

  std::unordered_set<std::string_view> tweeted;
  for (const auto& t : tweets) {
    if (!paper_ids.count(t.paper_id)) {
      throw Error(ErrorKind::UnknownPaperId, "tweet " + t.tweet_id + " cites unknown paper " + t.paper_id);
    }
    tweeted.insert(t.paper_id);
    if (t.raw_location) ++stats.tweets_with_location;
  }
  if (resolved_count > stats.tweets_with_location) {
    throw Error(ErrorKind::InvalidArgument, "more resolved tweets than tweets with a location");
  }
  stats.papers_tweeted = tweeted.size();
  stats.tweets_resolved = resolved_count;
  stats.coverage_pct = percent_one_decimal(stats.papers_tweeted, stats.papers_total);
  stats.resolved_pct_of_all = percent_one_decimal(stats.tweets_resolved, stats.tweets_total);
  return stats;
}

std::set<std::string> load_paper_ids(const std::filesystem::path& path) {
  std::istringstream in(io::read_text(path));
  std::set<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    std::string_view id = io::trim(line);
    if (id.empty() || id.front() == '#') continue;
    ids.emplace(id);
  }
  return ids;
}

PaperCounts parse_paper_counts(std::string_view csv_text, const std::filesystem::path& source) {
  csv::Table table = csv::parse(csv_text);
  csv::require_header(table, {"region_code", "papers"}, source);
  PaperCounts counts;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    std::string where = source.string() + ":" + std::to_string(table.line_numbers[i]);
    std::string code(io::trim(row[0]));
    if (code.empty()) throw Error(ErrorKind::EmptyField, where + ": empty region_code");
    auto n = io::parse_int(row[1]);
    if (!n) throw Error(ErrorKind::SchemaError, where + ": papers must be an integer");
    if (*n < 0) throw Error(ErrorKind::NegativeValue, where + ": negative paper count");
    if (!counts.emplace(code, *n).second) throw Error(ErrorKind::SchemaError, where + ": duplicate region " + code);
  }
  return counts;
}

PaperCounts load_paper_counts(const std::filesystem::path& path) {
  return parse_paper_counts(io::read_text(path), path);
}

std::string region_key(const ResolvedLocation& loc, RegionKind kind) {
  if (kind == RegionKind::Country) return loc.country_code;
  if (loc.country_code != "USA" || !loc.state_code) return {};
  return *loc.state_code;
}

PanelBuild build_panel(const std::vector<ResolvedTweet>& resolved, const std::vector<BurdenValue>& burden,
                       const PaperCounts& papers, RegionKind kind) {
  PanelBuild out;
  for (const auto& item : resolved) {
    std::string key = region_key(item.location, kind);
    if (key.empty()) {
      ++out.tweets_outside_scope;
      continue;
    }
    ++out.tweets_by_region[key];
  }

  std::map<std::string_view, double> burden_by_region;
  for (const auto& b : burden) burden_by_region.emplace(b.region_code, b.value);

  for (const auto& [region, tweets] : out.tweets_by_region) {
    auto b = burden_by_region.find(region);
    if (b == burden_by_region.end()) {
      ++out.excluded_no_burden;
      out.tweets_in_excluded_regions += static_cast<std::size_t>(tweets);
      continue;
    }
    auto p = papers.find(region);
    if (p == papers.end()) {
      ++out.excluded_no_papers;
      out.tweets_in_excluded_regions += static_cast<std::size_t>(tweets);
      continue;
    }
    out.rows.push_back({region, tweets, b->second, p->second});
  }
  return out;
}

std::string format_panel_csv(const std::vector<RegionPanel>& rows) {
  std::string out = "region_code,tweets,burden,papers\n";
  for (const auto& r : rows) {
    out += csv::format_row({r.region_code, std::to_string(r.tweets), io::format_double(r.burden),
                            std::to_string(r.papers)});
  }
  return out;
}

std::vector<RegionPanel> parse_panel_csv(std::string_view csv_text, const std::filesystem::path& source) {
  csv::Table table = csv::parse(csv_text);
  csv::require_header(table, {"region_code", "tweets", "burden", "papers"}, source);
  std::vector<RegionPanel> rows;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    auto tweets = io::parse_int(row[1]);
    auto burden = io::parse_double(row[2]);
    auto papers = io::parse_int(row[3]);
    if (row[0].empty() || !tweets || !burden || !papers || *tweets < 0 || *papers < 0 || *burden < 0.0 ||
        !std::isfinite(*burden)) {
      throw Error(ErrorKind::SchemaError, source.string() + ":" + std::to_string(table.line_numbers[i]) +
                                              ": bad panel row");
    }
    rows.push_back({row[0], *tweets, *burden, *papers});
  }
  return rows;
}

}  // namespace geosensor
