#include "geosensor/burden.hpp"

#include <algorithm>
#include <cmath>

#include "geosensor/csv.hpp"
#include "geosensor/error.hpp"
#include "geosensor/io.hpp"

namespace geosensor {

std::string_view to_string(RegionKind kind) { return kind == RegionKind::Country ? "country" : "us-state"; }

RegionKind parse_region_kind(std::string_view text) {
  if (text == "country") return RegionKind::Country;
  if (text == "us-state") return RegionKind::UsState;
  throw Error(ErrorKind::Validation, "region kind must be 'country' or 'us-state', got '" + std::string(text) + "'");
}

BurdenValue aggregate_endpoints(const BurdenSeries& series, int first_year, int second_year) {
  BurdenValue out;
  out.region_code = series.region_code;
  out.rule = AggregationRule::MeanOfEndpoints;
  double sum = 0.0;
  for (int year : {first_year, second_year}) {
    if (auto it = series.values.find(year); it != series.values.end()) {
      sum += it->second;
      out.years_used.push_back(year);
    }
  }
  if (out.years_used.empty()) {
    throw Error(ErrorKind::NoData, series.region_code + ": no value for " + std::to_string(first_year) + " or " +
                                       std::to_string(second_year));
  }
  out.value = sum / static_cast<double>(out.years_used.size());
  return out;
}

BurdenValue aggregate_hiv_world(const BurdenSeries& series) {
  if (series.measure != Measure::CaseCount) throw Error(ErrorKind::InvalidArgument, "HIV burden must be case counts");
  return aggregate_endpoints(series, 2010, 2018);
}

BurdenValue aggregate_us_hiv(const BurdenSeries& series) {
  if (series.measure != Measure::CaseCount) throw Error(ErrorKind::InvalidArgument, "HIV burden must be case counts");
  return aggregate_endpoints(series, 2016, 2017);
}

BurdenValue aggregate_window(const BurdenSeries& series, int first_year, int last_year) {
  BurdenValue out;
  out.region_code = series.region_code;
  out.rule = AggregationRule::MeanOverWindow;
  double sum = 0.0;
  for (auto it = series.values.lower_bound(first_year); it != series.values.end() && it->first <= last_year; ++it) {
    sum += it->second;
    out.years_used.push_back(it->first);
  }
  if (out.years_used.empty()) {
    throw Error(ErrorKind::NoData, series.region_code + ": no value in " + std::to_string(first_year) + "-" +
                                       std::to_string(last_year));
  }
  out.value = sum / static_cast<double>(out.years_used.size());
  return out;
}

std::vector<BurdenSeries> parse_burden(std::string_view csv_text, Measure measure, RegionKind kind,
                                       const std::filesystem::path& source) {
  csv::Table table = csv::parse(csv_text);
  csv::require_header(table, {"region_code", "year", "value"}, source);

  const std::size_t code_len = kind == RegionKind::Country ? 3 : 2;
  std::map<std::string, BurdenSeries> by_region;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    std::string where = source.string() + ":" + std::to_string(table.line_numbers[i]);
    std::string code(io::trim(row[0]));
    if (code.size() != code_len ||
        !std::all_of(code.begin(), code.end(), [](char c) { return c >= 'A' && c <= 'Z'; })) {
      throw Error(ErrorKind::SchemaError, where + ": bad region code '" + code + "' for " +
                                              std::string(to_string(kind)) + " regions");
    }
    auto year = io::parse_int(row[1]);
    auto value = io::parse_double(row[2]);
    if (!year || !value || !std::isfinite(*value)) throw Error(ErrorKind::SchemaError, where + ": unparseable row");
    if (*value < 0.0) throw Error(ErrorKind::NegativeValue, where + ": negative burden for " + code);

    auto& series = by_region[code];
    series.region_code = code;
    series.measure = measure;
    if (!series.values.emplace(static_cast<int>(*year), *value).second) {
      throw Error(ErrorKind::DuplicateYear, where + ": duplicate (" + code + "," + std::to_string(*year) + ")");
    }
  }

  std::vector<BurdenSeries> out;
  out.reserve(by_region.size());
  for (auto& [code, series] : by_region) out.push_back(std::move(series));
  return out;
}

std::vector<BurdenSeries> load_burden(const std::filesystem::path& path, Measure measure, RegionKind kind) {
  return parse_burden(io::read_text(path), measure, kind, path);
}

BurdenAggregation aggregate_all(const std::vector<BurdenSeries>& series, BurdenRule rule) {
  BurdenAggregation out;
  for (const auto& s : series) {
    try {
      switch (rule) {
        case BurdenRule::HivWorld: out.values.push_back(aggregate_hiv_world(s)); break;
        case BurdenRule::UsHiv: out.values.push_back(aggregate_us_hiv(s)); break;
        case BurdenRule::Window: out.values.push_back(aggregate_window(s)); break;
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoData) throw;
      out.no_data.push_back(s.region_code);
    }
  }
  auto by_code = [](const auto& a, const auto& b) { return a.region_code < b.region_code; };
  std::sort(out.values.begin(), out.values.end(), by_code);
  std::sort(out.no_data.begin(), out.no_data.end());
  return out;
}

}  // namespace geosensor
