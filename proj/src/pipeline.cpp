#include "geosensor/pipeline.hpp"

#include <chrono>
#include <functional>
#include <set>
#include <sstream>

#include <json.hpp>

#include "geosensor/count_glm.hpp"
#include "geosensor/csv.hpp"
#include "geosensor/gazetteer.hpp"
#include "geosensor/io.hpp"
#include "geosensor/linkage.hpp"
#include "geosensor/location_filter.hpp"
#include "geosensor/percent.hpp"

namespace geosensor {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::Filter: return "filter";
    case Stage::Geocode: return "geocode";
    case Stage::Panel: return "panel";
    case Stage::Fit: return "fit";
    case Stage::Render: return "render";
    case Stage::Run: return "run";
  }
  return "unknown";
}

// --- config -------------------------------------------------------------------

Measure RunConfig::measure() const {
  return disease == "malaria" ? Measure::IncidencePer1000AtRisk : Measure::CaseCount;
}

BurdenRule RunConfig::effective_burden_rule() const {
  if (burden_rule) return *burden_rule;
  if (disease == "hiv") return region_kind == RegionKind::UsState ? BurdenRule::UsHiv : BurdenRule::HivWorld;
  return BurdenRule::Window;
}

std::string RunConfig::burden_label() const {
  if (disease == "tb") return "Number of incident tuberculosis cases";
  if (disease == "malaria") return "Malaria incidences (per 1,000 population at risk)";
  if (disease == "hiv") return "Number of HIV cases";
  return "Burden";
}

std::string RunConfig::map_title() const {
  if (!map.title.empty()) return map.title;
  std::string name = disease == "tb" ? "tuberculosis" : disease == "hiv" ? "HIV" : disease;
  return "Tweeting on papers dealing with " + name +
         (region_kind == RegionKind::Country ? " worldwide" : " in the USA");
}

namespace {

[[noreturn]] void bad_setting(std::string_view key, std::string_view value, std::string_view why) {
  throw Error(ErrorKind::Validation, "config '" + std::string(key) + "=" + std::string(value) + "': " + std::string(why));
}

double number_setting(std::string_view key, std::string_view value) {
  auto v = io::parse_double(value);
  if (!v) bad_setting(key, value, "expected a number");
  return *v;
}

}  // namespace

void apply_setting(RunConfig& c, std::string_view key, std::string_view value, const fs::path& base_dir) {
  value = io::trim(value);
  auto path = [&] { return fs::path(value).is_absolute() ? fs::path(value) : base_dir / fs::path(value); };

  if (key == "disease") {
    if (value != "tb" && value != "malaria" && value != "hiv") bad_setting(key, value, "expected tb, malaria or hiv");
    c.disease = std::string(value);
  } else if (key == "tweets") {
    c.tweets = path();
  } else if (key == "paper_ids") {
    c.paper_ids = path();
  } else if (key == "paper_counts") {
    c.paper_counts = path();
  } else if (key == "burden") {
    c.burden = path();
  } else if (key == "gazetteer") {
    c.gazetteer = path();
  } else if (key == "boundaries") {
    c.boundaries = path();
  } else if (key == "exclusions") {
    c.exclusions = value.empty() ? fs::path() : path();
  } else if (key == "cache") {
    c.cache = value.empty() ? fs::path() : path();
  } else if (key == "output_dir") {
    c.output_dir = path();
  } else if (key == "regions") {
    try {
      c.region_kind = parse_region_kind(value);
    } catch (const Error&) {
      bad_setting(key, value, "expected country or us-state");
    }
  } else if (key == "burden_rule") {
    if (value == "hiv-world") c.burden_rule = BurdenRule::HivWorld;
    else if (value == "us-hiv") c.burden_rule = BurdenRule::UsHiv;
    else if (value == "window") c.burden_rule = BurdenRule::Window;
    else bad_setting(key, value, "expected hiv-world, us-hiv or window");
  } else if (key == "geocode") {
    if (value == "offline") c.geocode_mode = GeocodeMode::Offline;
    else if (value == "external") c.geocode_mode = GeocodeMode::External;
    else bad_setting(key, value, "expected offline or external");
  } else if (key == "geocode_rps") {
    c.geocode_rps = number_setting(key, value);
    if (!(c.geocode_rps > 0)) bad_setting(key, value, "must be positive");
  } else if (key == "classes") {
    auto v = io::parse_int(value);
    if (!v || *v < 2) bad_setting(key, value, "expected an integer >= 2");
    c.map.classes = static_cast<int>(*v);
  } else if (key == "canvas") {
    auto x = value.find('x');
    auto w = x == std::string_view::npos ? std::nullopt : io::parse_int(value.substr(0, x));
    auto h = x == std::string_view::npos ? std::nullopt : io::parse_int(value.substr(x + 1));
    if (!w || !h || *w <= 0 || *h <= 0) bad_setting(key, value, "expected WxH");
    c.map.projection.width = static_cast<int>(*w);
    c.map.projection.height = static_cast<int>(*h);
  } else if (key == "extent") {
    std::vector<double> parts;
    std::size_t start = 0;
    while (start <= value.size()) {
      auto comma = value.find(',', start);
      auto v = io::parse_double(value.substr(start, comma == std::string_view::npos ? value.npos : comma - start));
      if (!v) bad_setting(key, value, "expected lon_min,lon_max,lat_min,lat_max");
      parts.push_back(*v);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (parts.size() != 4 || !(parts[0] < parts[1]) || !(parts[2] < parts[3])) {
      bad_setting(key, value, "expected lon_min,lon_max,lat_min,lat_max with min < max");
    }
    c.map.projection.lon_min = parts[0];
    c.map.projection.lon_max = parts[1];
    c.map.projection.lat_min = parts[2];
    c.map.projection.lat_max = parts[3];
  } else if (key == "dot_base") {
    c.map.dots.base = number_setting(key, value);
  } else if (key == "dot_min") {
    c.map.dots.min = number_setting(key, value);
  } else if (key == "dot_max") {
    c.map.dots.max = number_setting(key, value);
  } else if (key == "title") {
    c.map.title = std::string(value);
  } else if (key == "seed") {
    auto v = io::parse_int(value);
    if (!v || *v < 0) bad_setting(key, value, "expected a non-negative integer");
    c.seed = static_cast<std::uint64_t>(*v);
  } else {
    throw Error(ErrorKind::Validation, "unknown config key '" + std::string(key) + "'");
  }
  if (!(c.map.dots.min > 0) || c.map.dots.min > c.map.dots.max || !(c.map.dots.base > 0)) {
    throw Error(ErrorKind::Validation, "dot sizes need 0 < dot_min <= dot_max and dot_base > 0");
  }
}

RunConfig parse_config(std::string_view text, const fs::path& base_dir) {
  RunConfig config;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view l = io::trim(line);
    if (l.empty() || l.front() == '#') continue;
    auto eq = l.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorKind::Validation, "config line " + std::to_string(line_no) + ": expected key = value");
    }
    apply_setting(config, io::trim(l.substr(0, eq)), l.substr(eq + 1), base_dir);
  }
  return config;
}

RunConfig load_config(const fs::path& path) {
  std::string text;
  try {
    text = io::read_text(path);
  } catch (const Error&) {
    throw Error(ErrorKind::Validation, "cannot read config " + path.string());
  }
  return parse_config(text, path.has_parent_path() ? path.parent_path() : fs::path("."));
}

void validate_config(const RunConfig& c, Stage stage) {
  std::vector<std::pair<std::string_view, const fs::path*>> required;
  auto need = [&](std::string_view name, const fs::path& p) { required.emplace_back(name, &p); };
  const bool all = stage == Stage::Run;

  if (c.disease.empty() && (all || stage == Stage::Panel || stage == Stage::Fit || stage == Stage::Render)) {
    throw Error(ErrorKind::Validation, "config is missing 'disease'");
  }
  if (all || stage == Stage::Filter) need("tweets", c.tweets);
  if (all) need("paper_ids", c.paper_ids);
  if (all || stage == Stage::Filter || stage == Stage::Geocode) need("gazetteer", c.gazetteer);
  if (all || stage == Stage::Panel || stage == Stage::Render) {
    need("burden", c.burden);
    need("paper_counts", c.paper_counts);
  }
  if (all || stage == Stage::Render) need("boundaries", c.boundaries);

  for (auto [name, p] : required) {
    if (p->empty()) throw Error(ErrorKind::Validation, "config is missing '" + std::string(name) + "'");
    if (!fs::is_regular_file(*p)) {
      throw Error(ErrorKind::Validation, std::string(name) + " file not found: " + p->string());
    }
  }
  if (!c.exclusions.empty() && (all || stage == Stage::Filter) && !fs::is_regular_file(c.exclusions)) {
    throw Error(ErrorKind::Validation, "exclusions file not found: " + c.exclusions.string());
  }
  if (c.geocode_mode == GeocodeMode::External && (all || stage == Stage::Geocode) &&
      EndpointConfig::from_env().url.empty()) {
    throw Error(ErrorKind::Validation, "external geocoding needs GEOSENSOR_GEOCODE_URL");
  }
  std::error_code ec;
  fs::create_directories(c.output_dir, ec);
  if (ec || !fs::is_directory(c.output_dir)) {
    throw Error(ErrorKind::Validation, "output directory not writable: " + c.output_dir.string());
  }
}

// --- stages --------------------------------------------------------------------

namespace {

fs::path out_path(const RunConfig& c, std::string_view name) { return c.output_dir / fs::path(name); }

std::string dump(const json& j) { return j.dump(2) + "\n"; }

template <typename Fn>
std::string guarded(Stage stage, Fn&& fn) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(stage, e.kind(), e.what());
  } catch (const std::exception& e) {
    throw StageError(stage, ErrorKind::Io, e.what());
  }
}

json read_json(const fs::path& p) {
  json j = json::parse(io::read_text(p), nullptr, false);
  if (j.is_discarded()) throw Error(ErrorKind::SchemaError, "unparseable JSON in " + p.string());
  return j;
}

std::vector<BurdenValue> load_burden_values(const RunConfig& c, std::vector<std::string>* no_data = nullptr) {
  auto series = load_burden(c.burden, c.measure(), c.region_kind);
  auto agg = aggregate_all(series, c.effective_burden_rule());
  if (no_data) *no_data = agg.no_data;
  return agg.values;
}

// resolved.csv round trip.
const csv::Row kResolvedHeader{"tweet_id", "paper_id", "loc_norm", "lat", "lon", "country_code", "state_code", "source"};

std::vector<ResolvedTweet> read_resolved(const fs::path& p) {
  csv::Table t = csv::read_file(p);
  csv::require_header(t, kResolvedHeader, p);
  std::vector<ResolvedTweet> out;
  out.reserve(t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& r = t.rows[i];
    auto lat = io::parse_double(r[3]);
    auto lon = io::parse_double(r[4]);
    if (!lat || !lon) throw Error(ErrorKind::SchemaError, p.string() + ": bad coordinates");
    ResolvedTweet rt;
    rt.record.tweet_id = r[0];
    rt.record.paper_id = r[1];
    rt.location.loc_norm = r[2];
    rt.location.lat = *lat;
    rt.location.lon = *lon;
    rt.location.country_code = r[5];
    if (!r[6].empty()) rt.location.state_code = r[6];
    rt.location.source = r[7] == "External" ? GeocodeSource::External
                         : r[7] == "Cache"  ? GeocodeSource::Cache
                                            : GeocodeSource::Offline;
    out.push_back(std::move(rt));
  }
  return out;
}

}  // namespace

std::string run_filter(const RunConfig& c) {
  return guarded(Stage::Filter, [&] {
    Gazetteer gaz = load_gazetteer(c.gazetteer);
    ExclusionRules rules = c.exclusions.empty() ? ExclusionRules::defaults() : load_exclusion_rules(c.exclusions);
    TweetLoad tweets = load_tweets(c.tweets);
    FilterOutcome outcome = filter_corpus(tweets.records, rules, gaz);

    std::string csv_text = csv::format_row({"tweet_id", "paper_id", "raw_location", "has_precise_geo", "loc_norm"});
    for (const auto& item : outcome.kept) {
      csv_text += csv::format_row({item.record.tweet_id, item.record.paper_id, item.record.raw_location.value_or(""),
                                   item.record.has_precise_geo ? "1" : "0", item.decision.loc_norm});
    }
    io::write_atomic(out_path(c, outputs::kFiltered), csv_text);

    std::size_t with_location = 0, precise = 0;
    for (const auto& t : tweets.records) {
      with_location += t.raw_location ? 1 : 0;
      precise += t.has_precise_geo ? 1 : 0;
    }
    json report = {{"tweets_total", tweets.records.size()},
                   {"tweets_with_location", with_location},
                   {"tweets_with_precise_geo_discarded", precise},
                   {"tally",
                    {{"Spurious", outcome.tally.spurious},
                     {"TooShort", outcome.tally.too_short},
                     {"NoWhitelistHit", outcome.tally.no_whitelist_hit},
                     {"Kept", outcome.tally.kept}}},
                   {"gazetteer",
                    {{"entries", gaz.entries().size()},
                     {"rows_rejected_bad_coordinate", gaz.load_stats().bad_coordinate},
                     {"rows_rejected_other", gaz.load_stats().rejected_other}}},
                   {"warnings", tweets.warnings}};
    std::string text = dump(report);
    io::write_atomic(out_path(c, outputs::kFilterReport), text);
    return text;
  });
}

std::string run_geocode(const RunConfig& c) {
  return guarded(Stage::Geocode, [&] {
    Gazetteer gaz = load_gazetteer(c.gazetteer);
    fs::path filtered = out_path(c, outputs::kFiltered);
    csv::Table t = csv::read_file(filtered);
    csv::require_header(t, {"tweet_id", "paper_id", "raw_location", "has_precise_geo", "loc_norm"}, filtered);

    std::vector<FilteredRecord> kept;
    kept.reserve(t.rows.size());
    for (const auto& r : t.rows) {
      FilteredRecord item;
      item.record.tweet_id = r[0];
      item.record.paper_id = r[1];
      if (!r[2].empty()) item.record.raw_location = r[2];
      item.record.has_precise_geo = r[3] == "1";
      item.decision.verdict = Verdict::Kept;
      item.decision.reason = FilterReason::Kept;
      item.decision.loc_norm = r[4];
      item.decision.matched = match_tokens(r[4], gaz);
      kept.push_back(std::move(item));
    }

    json filter_report = read_json(out_path(c, outputs::kFilterReport));
    const std::size_t all_tweets = filter_report.at("tweets_total").get<std::size_t>();

    BatchResolution batch;
    json external_stats;
    if (c.geocode_mode == GeocodeMode::External) {
      EndpointConfig endpoint = EndpointConfig::from_env();
      endpoint.requests_per_second = c.geocode_rps;
      GeocodeCache cache(c.cache.empty() ? out_path(c, "geocode_cache.tsv") : c.cache);
      ExternalGeocoder geocoder(gaz, cache, endpoint, make_http_transport(endpoint),
                                RateLimiter(endpoint.requests_per_second));
      batch = resolve_batch(kept, GeocodeMode::External, gaz, &geocoder);
      const auto& s = geocoder.stats();
      external_stats = {{"http_requests", s.http_requests}, {"cache_hits", s.cache_hits},
                        {"unreachable", s.unreachable},     {"malformed", s.malformed},
                        {"misses", s.misses}};
    } else {
      batch = resolve_batch(kept, GeocodeMode::Offline, gaz);
    }

    std::string csv_text = csv::format_row(kResolvedHeader);
    for (const auto& rt : batch.resolved) {
      const auto& l = rt.location;
      csv_text += csv::format_row({rt.record.tweet_id, rt.record.paper_id, l.loc_norm, io::format_double(l.lat),
                                   io::format_double(l.lon), l.country_code, l.state_code.value_or(""),
                                   std::string(to_string(l.source))});
    }
    io::write_atomic(out_path(c, outputs::kResolved), csv_text);

    json report = {{"kept", kept.size()},
                   {"resolved", batch.resolved.size()},
                   {"skipped", batch.skipped},
                   {"tweets_total", all_tweets},
                   {"resolved_pct_of_all", percent_one_decimal(batch.resolved.size(), all_tweets)},
                   {"summary", format_resolution_rate(batch.resolved.size(), all_tweets)},
                   {"mode", c.geocode_mode == GeocodeMode::External ? "external" : "offline"}};
    if (!external_stats.is_null()) report["external"] = external_stats;
    std::string text = dump(report);
    io::write_atomic(out_path(c, outputs::kGeocodeReport), text);
    return text;
  });
}

std::string run_panel(const RunConfig& c) {
  return guarded(Stage::Panel, [&] {
    std::vector<std::string> no_data;
    auto burden = load_burden_values(c, &no_data);
    PaperCounts papers = load_paper_counts(c.paper_counts);
    auto resolved = read_resolved(out_path(c, outputs::kResolved));
    PanelBuild panel = build_panel(resolved, burden, papers, c.region_kind);
    io::write_atomic(out_path(c, outputs::kPanel), format_panel_csv(panel.rows));

    json report = {{"n", panel.rows.size()},
                   {"regions_with_tweets", panel.tweets_by_region.size()},
                   {"excluded_no_burden", panel.excluded_no_burden},
                   {"excluded_no_papers", panel.excluded_no_papers},
                   {"tweets_resolved", resolved.size()},
                   {"tweets_outside_scope", panel.tweets_outside_scope},
                   {"tweets_in_excluded_regions", panel.tweets_in_excluded_regions},
                   {"burden_no_data_regions", no_data},
                   {"region_kind", std::string(to_string(c.region_kind))}};
    std::string text = dump(report);
    io::write_atomic(out_path(c, outputs::kPanelReport), text);
    return text;
  });
}

std::string run_fit(const RunConfig& c) {
  return guarded(Stage::Fit, [&] {
    fs::path panel_path = out_path(c, outputs::kPanel);
    auto panel = parse_panel_csv(io::read_text(panel_path), panel_path);
    PanelModel model = fit_panel(panel, c.region_kind, c.burden_label());
    const GlmFit& fit = model.fit;

    io::write_atomic(out_path(c, outputs::kFitTable), summarize(fit, model.labels, c.region_kind));
    io::write_atomic(out_path(c, outputs::kFitCsv), fit_csv(fit, model.labels));

    json terms = json::array();
    for (Eigen::Index j = 0; j < fit.beta.size(); ++j) {
      json term = {{"term", j == 0 ? std::string("Constant") : model.labels[static_cast<std::size_t>(j - 1)]},
                   {"coefficient", fit.beta(j)},
                   {"se", fit.se(j)},
                   {"z", fit.z(j)},
                   {"p", fit.p(j)}};
      if (j > 0) {
        term["pct_change"] = fit.pct_change(j - 1);
        term["sd"] = fit.sds(j - 1);
      }
      terms.push_back(std::move(term));
    }
    json report = {{"n", fit.n},
                   {"sample", format_sample_size(static_cast<long>(fit.n), c.region_kind)},
                   {"converged", fit.converged},
                   {"diagnostic", fit.diagnostic},
                   {"iterations", fit.iterations},
                   {"deviance", fit.deviance},
                   {"loglik", fit.loglik},
                   {"score_max", fit.score_max},
                   {"terms", std::move(terms)}};
    std::string text = dump(report);
    io::write_atomic(out_path(c, outputs::kFitReport), text);
    return text;
  });
}

std::string run_render(const RunConfig& c) {
  return guarded(Stage::Render, [&] {
    auto burden = load_burden_values(c);
    PaperCounts papers = load_paper_counts(c.paper_counts);
    auto resolved = read_resolved(out_path(c, outputs::kResolved));
    Boundaries boundaries = load_boundaries(c.boundaries);

    std::map<std::string, std::optional<double>> burdens;
    for (const auto& [code, polys] : boundaries.regions) burdens.emplace(code, std::nullopt);
    for (const auto& b : burden) burdens[b.region_code] = b.value;
    Classification classes = classify(burdens, c.map.classes);

    MapSpec spec;
    spec.regions = classes.regions;
    spec.legend = classes.breaks;
    spec.projection = c.map.projection;
    spec.title = c.map_title();
    std::size_t out_of_scope = 0;
    for (const auto& rt : resolved) {
      std::string key = region_key(rt.location, c.region_kind);
      if (key.empty()) {
        ++out_of_scope;
        continue;
      }
      auto p = papers.find(key);
      spec.dots.push_back(make_dot(rt.location.lat, rt.location.lon, p == papers.end() ? 0 : p->second, c.map.dots));
    }

    RenderResult svg = render_svg(spec, boundaries);
    io::write_atomic(out_path(c, outputs::kSvg), svg.document);
    io::write_atomic(out_path(c, outputs::kGeoJson), render_geojson(spec, &boundaries));

    std::vector<std::string> warnings = classes.warnings;
    warnings.insert(warnings.end(), svg.warnings.begin(), svg.warnings.end());
    json report = {{"regions", spec.regions.size()},
                   {"dots", spec.dots.size()},
                   {"tweets_outside_scope", out_of_scope},
                   {"classes", c.map.classes},
                   {"degenerate_classes", classes.degenerate},
                   {"warnings", warnings}};
    std::string text = dump(report);
    io::write_atomic(out_path(c, outputs::kMapReport), text);
    return text;
  });
}

std::string run_all(const RunConfig& c) {
  validate_config(c, Stage::Run);

  json timings = json::object();
  auto timed = [&](Stage stage, const std::function<std::string(const RunConfig&)>& fn) {
    auto start = std::chrono::steady_clock::now();
    json report = json::parse(fn(c));
    auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    timings[std::string(to_string(stage))] = ms;
    return report;
  };

  json filter = timed(Stage::Filter, run_filter);
  json geocode = timed(Stage::Geocode, run_geocode);

  json coverage = json::parse(guarded(Stage::Run, [&] {
    TweetLoad tweets = load_tweets(c.tweets);
    std::set<std::string> ids = load_paper_ids(c.paper_ids);
    CoverageStats s = compute_coverage(ids, tweets.records, geocode.at("resolved").get<std::size_t>());
    return json{{"papers_total", s.papers_total},
                {"papers_tweeted", s.papers_tweeted},
                {"coverage_pct", s.coverage_pct},
                {"tweets_total", s.tweets_total},
                {"tweets_with_location", s.tweets_with_location},
                {"tweets_resolved", s.tweets_resolved},
                {"resolved_pct_of_all", s.resolved_pct_of_all}}
        .dump();
  }));

  json panel = timed(Stage::Panel, run_panel);
  json fit = timed(Stage::Fit, run_fit);
  json map = timed(Stage::Render, run_render);

  json outputs_list = json::array();
  for (auto name : {outputs::kFiltered, outputs::kResolved, outputs::kPanel, outputs::kFitTable, outputs::kFitCsv,
                    outputs::kSvg, outputs::kGeoJson}) {
    outputs_list.push_back(std::string(name));
  }
  json report = {{"disease", c.disease},
                 {"region_kind", std::string(to_string(c.region_kind))},
                 {"coverage", coverage},
                 {"filter", filter},
                 {"resolution", geocode},
                 {"panel", panel},
                 {"fit", fit},
                 {"map", map},
                 {"outputs", outputs_list},
                 {"timings_ms", timings}};
  std::string text = dump(report);
  io::write_atomic(out_path(c, outputs::kRunReport), text);
  return text;
}

std::string strip_timings(std::string_view report_json) {
  json j = json::parse(report_json);
  j.erase("timings_ms");
  return j.dump(2);
}

}  // namespace geosensor
