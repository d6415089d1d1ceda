#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "geosensor/burden.hpp"
#include "geosensor/error.hpp"
#include "geosensor/geocoder.hpp"
#include "geosensor/mapgen.hpp"

namespace geosensor {

enum class Stage { Filter, Geocode, Panel, Fit, Render, Run };
std::string_view to_string(Stage stage);

struct MapOptions {
  int classes = 5;
  Projection projection;
  DotStyle dots;
  std::string title;  // empty: derived from disease and region kind
};

struct RunConfig {
  std::string disease;  // tb | malaria | hiv
  std::filesystem::path tweets;
  std::filesystem::path paper_ids;
  std::filesystem::path paper_counts;
  std::filesystem::path burden;
  std::filesystem::path gazetteer;
  std::filesystem::path boundaries;
  std::filesystem::path exclusions;  // optional
  std::filesystem::path cache;       // optional; external mode only
  RegionKind region_kind = RegionKind::Country;
  std::optional<BurdenRule> burden_rule;  // default derived from disease
  GeocodeMode geocode_mode = GeocodeMode::Offline;
  double geocode_rps = 1.0;
  MapOptions map;
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 20200127;  // synthetic fixtures only

  Measure measure() const;
  BurdenRule effective_burden_rule() const;
  std::string burden_label() const;
  std::string map_title() const;
};

/// Parses `key = value` lines ('#' comments). Relative paths resolve against
/// `base_dir`. Unknown keys are a Validation error.
RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir);
RunConfig load_config(const std::filesystem::path& path);

// Applies one `key=value` override with the same rules as the file.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value,
                   const std::filesystem::path& base_dir);

// Checks that every input the stage reads exists. Throws Error(Validation).
void validate_config(const RunConfig& config, Stage stage);

/// Failure inside a stage, tagged with the stage name.
class StageError : public std::runtime_error {
 public:
  StageError(Stage stage, ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(stage)) + " stage failed: " + message), stage_(stage), kind_(kind) {}
  Stage stage() const noexcept { return stage_; }
  ErrorKind kind() const noexcept { return kind_; }

 private:
  Stage stage_;
  ErrorKind kind_;
};

// File names inside the output directory.
namespace outputs {
inline constexpr std::string_view kFiltered = "filtered.csv";
inline constexpr std::string_view kFilterReport = "filter_report.json";
inline constexpr std::string_view kResolved = "resolved.csv";
inline constexpr std::string_view kGeocodeReport = "geocode_report.json";
inline constexpr std::string_view kPanel = "panel.csv";
inline constexpr std::string_view kPanelReport = "panel_report.json";
inline constexpr std::string_view kFitTable = "fit_table.txt";
inline constexpr std::string_view kFitCsv = "fit.csv";
inline constexpr std::string_view kFitReport = "fit_report.json";
inline constexpr std::string_view kSvg = "map.svg";
inline constexpr std::string_view kGeoJson = "map.geojson";
inline constexpr std::string_view kMapReport = "map_report.json";
inline constexpr std::string_view kRunReport = "report.json";
}  // namespace outputs

// Each stage reads its inputs from the config and the previous stage's files
// in the output directory, writes its own files atomically, and returns its
// JSON report (also written to disk). Failures throw StageError.
std::string run_filter(const RunConfig& config);
std::string run_geocode(const RunConfig& config);
std::string run_panel(const RunConfig& config);
std::string run_fit(const RunConfig& config);
std::string run_render(const RunConfig& config);

/// Validates, then runs filter, geocode, panel, fit and render in order and
/// writes report.json. Outputs of completed stages survive a later failure.
/// Returns the report JSON text.
std::string run_all(const RunConfig& config);

// The report without its "timings_ms" member, for byte comparison.
std::string strip_timings(std::string_view report_json);

}  // namespace geosensor
