#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace geosensor {

// 1 / ln(max(papers, 2)). Counts below two are clamped so the weight stays
// finite and positive.
double dot_weight(double papers);
double dot_weight(std::int64_t papers);

struct DotStyle {
  double base = 4.0;
  double min = 1.5;
  double max = 12.0;
};

struct DotSpec {
  double lat = 0.0;
  double lon = 0.0;
  double weight = 1.0;
  double radius_px = 1.0;
};

// radius = base * weight clamped into [min, max].
DotSpec make_dot(double lat, double lon, std::int64_t papers, const DotStyle& style);

inline constexpr std::string_view kNoDataFill = "#ffffff";

struct ClassedRegion {
  std::string region_code;
  std::optional<double> burden;
  std::optional<int> class_index;  // nullopt = no data
  std::string fill;
};

struct ClassBreak {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t count = 0;
  std::string fill;
};

struct Classification {
  std::vector<ClassedRegion> regions;  // sorted by region code
  std::vector<ClassBreak> breaks;      // one per class, possibly empty
  bool degenerate = false;             // fewer non-empty classes than requested
  std::vector<std::string> warnings;
};

// Light-to-dark sequential blue, `classes` entries.
std::vector<std::string> blue_ramp(int classes);

/// Quantile classes over the regions that have data: a region whose value
/// has r strictly smaller values among m data regions lands in class
/// floor(classes * r / m). Ties share a class; regions without data are
/// white. Throws Error(InvalidArgument) for classes < 2.
Classification classify(const std::map<std::string, std::optional<double>>& burdens, int classes = 5);

// Equirectangular: lon_min..lon_max -> 0..width, lat_max..lat_min -> 0..height.
// The default extent is the whole globe.
struct Projection {
  int width = 1000;
  int height = 500;
  double lon_min = -180.0;
  double lon_max = 180.0;
  double lat_min = -90.0;
  double lat_max = 90.0;

  double x(double lon) const { return (lon - lon_min) / (lon_max - lon_min) * width; }
  double y(double lat) const { return (lat_max - lat) / (lat_max - lat_min) * height; }
};

struct MapSpec {
  std::vector<ClassedRegion> regions;
  std::vector<DotSpec> dots;
  Projection projection;
  std::vector<ClassBreak> legend;
  std::string title;
};

using Ring = std::vector<std::pair<double, double>>;  // (lon, lat)
using Polygon = std::vector<Ring>;                   // outer ring, then holes

struct Boundaries {
  std::map<std::string, std::vector<Polygon>> regions;
};

// GeoJSON FeatureCollection; each feature carries a string `region_code`
// property and a Polygon or MultiPolygon geometry. Throws
// Error(MalformedBoundaries) on anything else.
Boundaries parse_boundaries(std::string_view geojson);
Boundaries load_boundaries(const std::filesystem::path& path);

struct RenderResult {
  std::string document;
  std::vector<std::string> warnings;  // regions without geometry
};

// SVG 1.1: region paths, then semi-transparent tweet dots, then the legend.
// Byte-deterministic for fixed input.
RenderResult render_svg(const MapSpec& spec, const Boundaries& boundaries);

// Same content as GeoJSON properties. Region geometry comes from
// `boundaries` when given, otherwise it is null.
std::string render_geojson(const MapSpec& spec, const Boundaries* boundaries = nullptr);

}  // namespace geosensor
