#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "geosensor/error.hpp"
#include "geosensor/linkage.hpp"
#include "test_support.hpp"

using namespace geosensor;

namespace {

std::set<std::string> ids(std::size_t n) {
  std::set<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.insert("p" + std::to_string(i));
  return out;
}

// `tweeted` distinct papers, each cited once.
std::vector<TweetRecord> tweets_citing(std::size_t tweeted) {
  std::vector<TweetRecord> out;
  for (std::size_t i = 0; i < tweeted; ++i) out.push_back({"t" + std::to_string(i), "p" + std::to_string(i), "x", false});
  return out;
}

ResolvedTweet at(std::string country, std::optional<std::string> state = std::nullopt) {
  ResolvedTweet t;
  t.record.tweet_id = "t";
  t.record.paper_id = "p";
  t.location.country_code = std::move(country);
  t.location.state_code = std::move(state);
  return t;
}

BurdenValue burden(std::string code, double v) { return {std::move(code), v, {2016}, AggregationRule::MeanOfEndpoints}; }

}  // namespace

TEST(Coverage, ReferenceRatios) {
  EXPECT_EQ(compute_coverage(ids(17295), tweets_citing(8442), 0).coverage_pct, 48.8);
  EXPECT_EQ(compute_coverage(ids(26595), tweets_citing(11139), 0).coverage_pct, 41.9);
  EXPECT_EQ(compute_coverage(ids(13974), tweets_citing(8403), 0).coverage_pct, 60.1);
  EXPECT_EQ(compute_coverage(ids(10), {}, 0).coverage_pct, 0.0);
}

TEST(Coverage, CountsDistinctPapersAndLocations) {
  std::vector<TweetRecord> t = {{"1", "p1", "Paris, France", false},
                                {"2", "p1", std::nullopt, true},
                                {"3", "p2", "Lyon", false},
                                {"4", "p2", "Lyon", false}};
  CoverageStats s = compute_coverage(ids(4), t, 2);
  EXPECT_EQ(s.papers_total, 4u);
  EXPECT_EQ(s.papers_tweeted, 2u);
  EXPECT_EQ(s.coverage_pct, 50.0);
  EXPECT_EQ(s.tweets_total, 4u);
  EXPECT_EQ(s.tweets_with_location, 3u);
  EXPECT_EQ(s.tweets_resolved, 2u);
  EXPECT_EQ(s.resolved_pct_of_all, 50.0);
}

TEST(Coverage, Errors) {
  try {
    compute_coverage(ids(2), {{"1", "zzz", std::nullopt, false}}, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnknownPaperId);
  }
  EXPECT_THROW(compute_coverage(ids(2), tweets_citing(1), 2), Error);
}

TEST(CoverageProperty, BoundedAndMonotone) {
  std::mt19937_64 rng(12);
  auto paper_set = ids(50);
  std::vector<TweetRecord> t;
  double last = 0;
  for (int i = 0; i < 300; ++i) {
    t.push_back({"t" + std::to_string(i), "p" + std::to_string(rng() % 50), std::nullopt, false});
    double pct = compute_coverage(paper_set, t, 0).coverage_pct;
    ASSERT_GE(pct, last);
    ASSERT_LE(pct, 100.0);
    last = pct;
  }
}

TEST(PaperIds, OnePerLine) {
  testing_support::TempDir dir("ids");
  testing_support::write_file(dir / "ids.txt", "# pmids\n101\n\n102\r\n101\n");
  EXPECT_EQ(load_paper_ids(dir / "ids.txt"), (std::set<std::string>{"101", "102"}));
}

TEST(PaperCounts, ParseAndErrors) {
  PaperCounts c = parse_paper_counts("region_code,papers\nFRA,12\nDEU,0\n");
  EXPECT_EQ(c.at("FRA"), 12);
  EXPECT_EQ(c.at("DEU"), 0);
  EXPECT_THROW(parse_paper_counts("region_code,papers\nFRA,-1\n"), Error);
  EXPECT_THROW(parse_paper_counts("region_code,papers\nFRA,1\nFRA,2\n"), Error);
  EXPECT_THROW(parse_paper_counts("region,papers\nFRA,1\n"), Error);
}

TEST(Tweets, LoadRules) {
  TweetLoad three = parse_tweets("tweet_id,paper_id,raw_location,has_precise_geo\n1,p,Paris,0\n2,p,,1\n3,p,\"a, b\",\n");
  ASSERT_EQ(three.records.size(), 3u);
  EXPECT_FALSE(three.records[1].raw_location.has_value());
  EXPECT_TRUE(three.records[1].has_precise_geo);
  EXPECT_EQ(three.records[2].raw_location, "a, b");

  try {
    parse_tweets("tweet_id,paper_id,raw_location,has_precise_geo\n1,,Paris,0\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyField);
  }

  TweetLoad dup = parse_tweets("tweet_id,paper_id,raw_location,has_precise_geo\n1,p,x,0\n1,p,y,0\n");
  EXPECT_EQ(dup.records.size(), 2u);
  EXPECT_EQ(dup.warnings.size(), 1u);
}

TEST(Panel, InclusionRule) {
  std::vector<ResolvedTweet> r = {at("FRA"), at("FRA"), at("DEU"), at("NGA"), at("NGA"), at("NGA"), at("NGA"),
                                  at("NGA"), at("GHA")};
  std::vector<BurdenValue> b = {burden("FRA", 10), burden("DEU", 20), burden("GHA", 5), burden("KEN", 7)};
  PaperCounts papers = {{"FRA", 100}, {"DEU", 200}, {"NGA", 50}, {"KEN", 9}};
  PanelBuild p = build_panel(r, b, papers, RegionKind::Country);
  ASSERT_EQ(p.rows.size(), 2u);
  EXPECT_EQ(p.rows[0], (RegionPanel{"DEU", 1, 20, 200}));
  EXPECT_EQ(p.rows[1], (RegionPanel{"FRA", 2, 10, 100}));
  EXPECT_EQ(p.excluded_no_burden, 1u);   // NGA, 5 tweets
  EXPECT_EQ(p.excluded_no_papers, 1u);   // GHA
  EXPECT_EQ(p.tweets_in_excluded_regions, 6u);
  EXPECT_EQ(p.tweets_by_region.size(), 4u);  // KEN has no tweets and stays out silently

  EXPECT_TRUE(build_panel({}, b, papers, RegionKind::Country).rows.empty());
}

TEST(Panel, UsStatesOnly) {
  std::vector<ResolvedTweet> r = {at("USA", "TX"), at("USA", "TX"), at("USA"), at("FRA"), at("USA", "CA")};
  std::vector<BurdenValue> b = {burden("TX", 3), burden("CA", 4)};
  PaperCounts papers = {{"TX", 1}, {"CA", 2}};
  PanelBuild p = build_panel(r, b, papers, RegionKind::UsState);
  ASSERT_EQ(p.rows.size(), 2u);
  EXPECT_EQ(p.rows[0].region_code, "CA");
  EXPECT_EQ(p.rows[1].tweets, 2);
  EXPECT_EQ(p.tweets_outside_scope, 2u);
}

TEST(Panel, FortyFourOfFiftyOneStates) {
  static const char* kStates[] = {"AK", "AL", "AR", "AZ", "CA", "CO", "CT", "DC", "DE", "FL", "GA", "HI", "IA",
                                  "ID", "IL", "IN", "KS", "KY", "LA", "MA", "MD", "ME", "MI", "MN", "MO", "MS",
                                  "MT", "NC", "ND", "NE", "NH", "NJ", "NM", "NV", "NY", "OH", "OK", "OR", "PA",
                                  "RI", "SC", "SD", "TN", "TX", "UT", "VA", "VT", "WA", "WI", "WV", "WY"};
  static_assert(std::size(kStates) == 51);
  const std::set<std::string> silent = {"AK", "DE", "ND", "SD", "VT", "WY", "MT"};
  std::vector<ResolvedTweet> r;
  std::vector<BurdenValue> b;
  PaperCounts papers;
  int i = 0;
  for (const char* s : kStates) {
    b.push_back(burden(s, 100.0 + i));
    papers[s] = 10 + i;
    if (!silent.count(s)) {
      for (int k = 0; k <= i % 4; ++k) r.push_back(at("USA", s));
    }
    ++i;
  }
  PanelBuild p = build_panel(r, b, papers, RegionKind::UsState);
  EXPECT_EQ(p.rows.size(), 44u);
}

TEST(PanelProperty, ConservationAndPermutation) {
  std::mt19937_64 rng(77);
  const std::vector<std::string> codes = {"AAA", "BBB", "CCC", "DDD", "EEE", "FFF"};
  for (int round = 0; round < 200; ++round) {
    std::vector<ResolvedTweet> r;
    int n = static_cast<int>(rng() % 40);
    for (int k = 0; k < n; ++k) r.push_back(at(codes[rng() % codes.size()]));
    std::vector<BurdenValue> b;
    PaperCounts papers;
    for (const auto& c : codes) {
      if (rng() % 4) b.push_back(burden(c, static_cast<double>(rng() % 100)));
      if (rng() % 4) papers[c] = static_cast<std::int64_t>(rng() % 50);
    }
    PanelBuild p = build_panel(r, b, papers, RegionKind::Country);
    std::int64_t in_panel = 0;
    for (const auto& row : p.rows) {
      ASSERT_GE(row.tweets, 1);
      in_panel += row.tweets;
    }
    ASSERT_EQ(static_cast<std::size_t>(in_panel) + p.tweets_in_excluded_regions, r.size());

    std::shuffle(r.begin(), r.end(), rng);
    std::shuffle(b.begin(), b.end(), rng);
    ASSERT_EQ(build_panel(r, b, papers, RegionKind::Country).rows, p.rows);
  }
}

TEST(PanelCsv, RoundTrip) {
  std::vector<RegionPanel> rows = {{"DEU", 3, 1234.5, 20}, {"FRA", 1, 0.1, 7}};
  std::string text = format_panel_csv(rows);
  EXPECT_EQ(text, "region_code,tweets,burden,papers\nDEU,3,1234.5,20\nFRA,1,0.1,7\n");
  EXPECT_EQ(parse_panel_csv(text), rows);
}
