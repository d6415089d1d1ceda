#include "geosensor/mapgen.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "geosensor/error.hpp"
#include "geosensor/io.hpp"

namespace geosensor {

namespace {

using nlohmann::json;

constexpr std::string_view kDotFill = "#d7301f";
constexpr int kLegendHeight = 60;

std::string hex_color(int r, int g, int b) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

std::string xml_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string px(double v) { return io::format_fixed(v, 2); }

std::string compact(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 3);
  return std::string(buf, end);
}

Ring parse_ring(const json& ring) {
  if (!ring.is_array()) throw Error(ErrorKind::MalformedBoundaries, "ring is not an array");
  Ring out;
  for (const auto& pt : ring) {
    if (!pt.is_array() || pt.size() < 2 || !pt[0].is_number() || !pt[1].is_number()) {
      throw Error(ErrorKind::MalformedBoundaries, "position is not [lon, lat]");
    }
    out.emplace_back(pt[0].get<double>(), pt[1].get<double>());
  }
  return out;
}

Polygon parse_polygon(const json& rings) {
  if (!rings.is_array() || rings.empty()) throw Error(ErrorKind::MalformedBoundaries, "polygon has no rings");
  Polygon out;
  for (const auto& r : rings) out.push_back(parse_ring(r));
  return out;
}

json geometry_json(const std::vector<Polygon>& polygons) {
  json coords = json::array();
  for (const auto& poly : polygons) {
    json rings = json::array();
    for (const auto& ring : poly) {
      json pts = json::array();
      for (auto [lon, lat] : ring) pts.push_back({lon, lat});
      rings.push_back(std::move(pts));
    }
    coords.push_back(std::move(rings));
  }
  return {{"type", "MultiPolygon"}, {"coordinates", std::move(coords)}};
}

}  // namespace

double dot_weight(double papers) { return 1.0 / std::log(std::max(papers, 2.0)); }

double dot_weight(std::int64_t papers) { return dot_weight(static_cast<double>(papers)); }

DotSpec make_dot(double lat, double lon, std::int64_t papers, const DotStyle& style) {
  DotSpec dot;
  dot.lat = lat;
  dot.lon = lon;
  dot.weight = dot_weight(papers);
  dot.radius_px = std::clamp(style.base * dot.weight, style.min, style.max);
  return dot;
}

std::vector<std::string> blue_ramp(int classes) {
  // #deebf7 -> #08306b
  constexpr int lo[3] = {0xde, 0xeb, 0xf7};
  constexpr int hi[3] = {0x08, 0x30, 0x6b};
  std::vector<std::string> out;
  for (int i = 0; i < classes; ++i) {
    double t = classes == 1 ? 1.0 : static_cast<double>(i) / (classes - 1);
    int c[3];
    for (int ch = 0; ch < 3; ++ch) c[ch] = static_cast<int>(std::lround(lo[ch] + t * (hi[ch] - lo[ch])));
    out.push_back(hex_color(c[0], c[1], c[2]));
  }
  return out;
}

Classification classify(const std::map<std::string, std::optional<double>>& burdens, int classes) {
  if (classes < 2) throw Error(ErrorKind::InvalidArgument, "need at least two classes");
  const auto ramp = blue_ramp(classes);

  std::vector<double> values;
  for (const auto& [code, b] : burdens) {
    if (b) values.push_back(*b);
  }
  std::sort(values.begin(), values.end());
  const auto m = values.size();

  Classification out;
  out.breaks.resize(static_cast<std::size_t>(classes));
  for (int c = 0; c < classes; ++c) out.breaks[static_cast<std::size_t>(c)].fill = ramp[static_cast<std::size_t>(c)];

  for (const auto& [code, b] : burdens) {
    ClassedRegion region;
    region.region_code = code;
    region.burden = b;
    if (!b) {
      region.fill = std::string(kNoDataFill);
    } else {
      auto below = static_cast<std::size_t>(std::lower_bound(values.begin(), values.end(), *b) - values.begin());
      int cls = static_cast<int>(static_cast<std::size_t>(classes) * below / m);
      region.class_index = cls;
      region.fill = ramp[static_cast<std::size_t>(cls)];
      auto& brk = out.breaks[static_cast<std::size_t>(cls)];
      if (brk.count == 0 || *b < brk.lower) brk.lower = *b;
      if (brk.count == 0 || *b > brk.upper) brk.upper = *b;
      ++brk.count;
    }
    out.regions.push_back(std::move(region));
  }

  auto used = std::count_if(out.breaks.begin(), out.breaks.end(), [](const auto& b) { return b.count > 0; });
  if (m > 0 && used < classes) {
    out.degenerate = true;
    if (m < static_cast<std::size_t>(classes)) {
      out.warnings.push_back("TooFewRegions: " + std::to_string(m) + " regions with data for " +
                             std::to_string(classes) + " classes");
    }
    out.warnings.push_back("classes collapsed: " + std::to_string(used) + " of " + std::to_string(classes) +
                           " classes populated");
  }
  return out;
}

Boundaries parse_boundaries(std::string_view geojson) {
  json doc = json::parse(geojson, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || doc.value("type", "") != "FeatureCollection" ||
      !doc.contains("features") || !doc["features"].is_array()) {
    throw Error(ErrorKind::MalformedBoundaries, "expected a GeoJSON FeatureCollection");
  }
  Boundaries out;
  for (const auto& feature : doc["features"]) {
    if (!feature.is_object() || !feature.contains("properties") || !feature["properties"].is_object()) {
      throw Error(ErrorKind::MalformedBoundaries, "feature without properties");
    }
    const auto& props = feature["properties"];
    if (!props.contains("region_code") || !props["region_code"].is_string()) {
      throw Error(ErrorKind::MalformedBoundaries, "feature without a string region_code property");
    }
    std::string code = props["region_code"].get<std::string>();
    const auto& geom = feature.contains("geometry") ? feature["geometry"] : json();
    if (!geom.is_object() || !geom.contains("coordinates")) {
      throw Error(ErrorKind::MalformedBoundaries, code + ": missing geometry");
    }
    std::string type = geom.value("type", "");
    auto& polys = out.regions[code];
    if (type == "Polygon") {
      polys.push_back(parse_polygon(geom["coordinates"]));
    } else if (type == "MultiPolygon") {
      if (!geom["coordinates"].is_array()) throw Error(ErrorKind::MalformedBoundaries, code + ": bad MultiPolygon");
      for (const auto& p : geom["coordinates"]) polys.push_back(parse_polygon(p));
    } else {
      throw Error(ErrorKind::MalformedBoundaries, code + ": unsupported geometry type '" + type + "'");
    }
  }
  return out;
}

Boundaries load_boundaries(const std::filesystem::path& path) { return parse_boundaries(io::read_text(path)); }

RenderResult render_svg(const MapSpec& spec, const Boundaries& boundaries) {
  const Projection& proj = spec.projection;
  const int total_height = proj.height + kLegendHeight;
  RenderResult out;
  std::string& svg = out.document;

  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + std::to_string(proj.width) +
         "\" height=\"" + std::to_string(total_height) + "\" viewBox=\"0 0 " + std::to_string(proj.width) + " " +
         std::to_string(total_height) + "\">\n";
  svg += "<title>" + xml_escape(spec.title) + "</title>\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(proj.width) + "\" height=\"" +
         std::to_string(proj.height) + "\" fill=\"#f0f0f0\"/>\n";

  svg += "<g id=\"regions\" stroke=\"#7f7f7f\" stroke-width=\"0.5\">\n";
  for (const auto& region : spec.regions) {
    auto geo = boundaries.regions.find(region.region_code);
    if (geo == boundaries.regions.end()) {
      out.warnings.push_back("MissingGeometry: " + region.region_code);
      continue;
    }
    std::string d;
    for (const auto& poly : geo->second) {
      for (const auto& ring : poly) {
        for (std::size_t i = 0; i < ring.size(); ++i) {
          d += (i == 0 ? "M" : "L") + px(proj.x(ring[i].first)) + "," + px(proj.y(ring[i].second));
        }
        if (!ring.empty()) d += "Z";
      }
    }
    svg += "<path id=\"region-" + xml_escape(region.region_code) + "\" fill=\"" + region.fill +
           "\" fill-rule=\"evenodd\" d=\"" + d + "\"/>\n";
  }
  svg += "</g>\n";

  svg += "<g id=\"tweets\" fill=\"" + std::string(kDotFill) + "\" fill-opacity=\"0.55\" stroke=\"none\">\n";
  for (const auto& dot : spec.dots) {
    svg += "<circle cx=\"" + px(proj.x(dot.lon)) + "\" cy=\"" + px(proj.y(dot.lat)) + "\" r=\"" + px(dot.radius_px) +
           "\"/>\n";
  }
  svg += "</g>\n";

  svg += "<g id=\"legend\" font-family=\"sans-serif\" font-size=\"11\">\n";
  int x = 10;
  const int y = proj.height + 15;
  auto swatch = [&](const std::string& fill, const std::string& label) {
    svg += "<rect x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(y) + "\" width=\"14\" height=\"14\" fill=\"" +
           fill + "\" stroke=\"#7f7f7f\" stroke-width=\"0.5\"/>\n";
    svg += "<text x=\"" + std::to_string(x + 18) + "\" y=\"" + std::to_string(y + 11) + "\">" + xml_escape(label) +
           "</text>\n";
    x += 30 + static_cast<int>(label.size()) * 7;
  };
  for (const auto& brk : spec.legend) {
    if (brk.count == 0) continue;
    swatch(brk.fill, compact(brk.lower) + " - " + compact(brk.upper));
  }
  swatch(std::string(kNoDataFill), "No data");
  svg += "</g>\n";
  svg += "</svg>\n";
  return out;
}

std::string render_geojson(const MapSpec& spec, const Boundaries* boundaries) {
  json features = json::array();
  for (const auto& region : spec.regions) {
    json props = {{"kind", "region"},
                  {"region_code", region.region_code},
                  {"burden", region.burden ? json(*region.burden) : json()},
                  {"class_index", region.class_index ? json(*region.class_index) : json()},
                  {"fill", region.fill}};
    json geometry;
    if (boundaries) {
      if (auto it = boundaries->regions.find(region.region_code); it != boundaries->regions.end()) {
        geometry = geometry_json(it->second);
      }
    }
    features.push_back({{"type", "Feature"}, {"properties", std::move(props)}, {"geometry", std::move(geometry)}});
  }
  for (const auto& dot : spec.dots) {
    features.push_back({{"type", "Feature"},
                        {"properties", {{"kind", "tweet"}, {"weight", dot.weight}, {"radius_px", dot.radius_px}}},
                        {"geometry", {{"type", "Point"}, {"coordinates", {dot.lon, dot.lat}}}}});
  }
  json legend = json::array();
  for (const auto& brk : spec.legend) {
    legend.push_back({{"lower", brk.lower}, {"upper", brk.upper}, {"count", brk.count}, {"fill", brk.fill}});
  }
  json doc = {{"type", "FeatureCollection"}, {"title", spec.title}, {"legend", std::move(legend)},
              {"features", std::move(features)}};
  return doc.dump(1) + "\n";
}

}  // namespace geosensor
