#include "geosensor/tweet.hpp"

#include <unordered_set>

#include "geosensor/csv.hpp"
#include "geosensor/error.hpp"
#include "geosensor/io.hpp"

namespace geosensor {

TweetLoad parse_tweets(std::string_view csv_text, const std::filesystem::path& source) {
  csv::Table table = csv::parse(csv_text);
  csv::require_header(table, {"tweet_id", "paper_id", "raw_location", "has_precise_geo"}, source);

  TweetLoad out;
  out.records.reserve(table.rows.size());
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    std::string where = source.string() + ":" + std::to_string(table.line_numbers[i]);
    TweetRecord r;
    r.tweet_id = std::string(io::trim(row[0]));
    r.paper_id = std::string(io::trim(row[1]));
    if (r.tweet_id.empty()) throw Error(ErrorKind::EmptyField, where + ": empty tweet_id");
    if (r.paper_id.empty()) throw Error(ErrorKind::EmptyField, where + ": empty paper_id");
    if (!io::trim(row[2]).empty()) r.raw_location = row[2];

    std::string_view geo = io::trim(row[3]);
    if (geo == "1" || geo == "true") r.has_precise_geo = true;
    else if (geo.empty() || geo == "0" || geo == "false") r.has_precise_geo = false;
    else throw Error(ErrorKind::SchemaError, where + ": has_precise_geo must be 0/1/true/false");

    if (!seen.insert(r.tweet_id).second) out.warnings.push_back(where + ": duplicate tweet_id " + r.tweet_id);
    out.records.push_back(std::move(r));
  }
  return out;
}

TweetLoad load_tweets(const std::filesystem::path& path) { return parse_tweets(io::read_text(path), path); }

}  // namespace geosensor
