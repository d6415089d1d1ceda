#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace geosensor {

struct TweetRecord {
  std::string tweet_id;
  std::string paper_id;
  std::optional<std::string> raw_location;
  // Kept for reporting only; precise coordinates are never used for placement.
  bool has_precise_geo = false;

  bool operator==(const TweetRecord&) const = default;
};

struct TweetLoad {
  std::vector<TweetRecord> records;
  std::vector<std::string> warnings;  // e.g. duplicate tweet ids
};

// CSV header: tweet_id,paper_id,raw_location,has_precise_geo
TweetLoad load_tweets(const std::filesystem::path& path);
TweetLoad parse_tweets(std::string_view csv_text, const std::filesystem::path& source = "<memory>");

}  // namespace geosensor
