#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace geosensor {

enum class Measure { CaseCount, IncidencePer1000AtRisk };
enum class RegionKind { Country, UsState };
enum class AggregationRule { MeanOfEndpoints, MeanOverWindow };

std::string_view to_string(RegionKind kind);
RegionKind parse_region_kind(std::string_view text);  // "country" | "us-state"

struct BurdenSeries {
  std::string region_code;
  std::map<int, double> values;  // year -> value >= 0
  Measure measure = Measure::CaseCount;
};

struct BurdenValue {
  std::string region_code;
  double value = 0.0;
  std::vector<int> years_used;
  AggregationRule rule = AggregationRule::MeanOverWindow;
};

// Mean of the two endpoint years; a lone endpoint is used as-is. Throws
// Error(NoData) when neither year is present.
BurdenValue aggregate_endpoints(const BurdenSeries& series, int first_year, int second_year);

// World HIV: endpoints 2010 and 2018. Requires a case-count series.
BurdenValue aggregate_hiv_world(const BurdenSeries& series);

// US HIV by state: endpoints 2016 and 2017.
BurdenValue aggregate_us_hiv(const BurdenSeries& series);

// Mean over whichever years in [first_year, last_year] are present.
BurdenValue aggregate_window(const BurdenSeries& series, int first_year = 2011, int last_year = 2017);

// CSV header region_code,year,value (long format). One series per region,
// sorted by region code.
std::vector<BurdenSeries> load_burden(const std::filesystem::path& path, Measure measure, RegionKind kind);
std::vector<BurdenSeries> parse_burden(std::string_view csv_text, Measure measure, RegionKind kind,
                                       const std::filesystem::path& source = "<memory>");

enum class BurdenRule { HivWorld, UsHiv, Window };

struct BurdenAggregation {
  std::vector<BurdenValue> values;  // sorted by region code
  std::vector<std::string> no_data;  // regions dropped for lack of data
};

BurdenAggregation aggregate_all(const std::vector<BurdenSeries>& series, BurdenRule rule);

}  // namespace geosensor
