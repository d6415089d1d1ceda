#include "geosensor/geocoder.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>
#include <tuple>

#include <httplib.h>
#include <json.hpp>

#include "geosensor/error.hpp"
#include "geosensor/io.hpp"
#include "geosensor/percent.hpp"

namespace geosensor {

namespace {

ResolvedLocation from_entry(std::string_view loc_norm, const GazetteerEntry& e) {
  ResolvedLocation r;
  r.loc_norm = std::string(loc_norm);
  r.lat = e.lat;
  r.lon = e.lon;
  r.country_code = e.country_code;
  if (e.country_code == "USA") r.state_code = e.state_code;
  r.source = GeocodeSource::Offline;
  return r;
}

template <typename Pred>
void narrow(std::vector<std::size_t>& candidates, Pred pred) {
  std::vector<std::size_t> kept;
  std::copy_if(candidates.begin(), candidates.end(), std::back_inserter(kept), pred);
  if (!kept.empty()) candidates = std::move(kept);
}

bool contains(const std::vector<std::string>& v, std::string_view s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

bool is_alpha3(std::string_view code) {
  return code.size() == 3 && std::all_of(code.begin(), code.end(), [](char c) { return c >= 'A' && c <= 'Z'; });
}

}  // namespace

std::string_view to_string(GeocodeSource source) {
  switch (source) {
    case GeocodeSource::Offline: return "Offline";
    case GeocodeSource::External: return "External";
    case GeocodeSource::Cache: return "Cache";
  }
  return "Unknown";
}

ResolvedLocation resolve_offline(const FilterDecision& decision, const Gazetteer& gaz) {
  if (!decision.kept() || !decision.matched) {
    throw Error(ErrorKind::InvalidArgument, "resolve_offline needs a kept decision");
  }
  const MatchResult& m = *decision.matched;

  if (!m.city_hits.empty()) {
    std::vector<std::size_t> candidates = m.city_hits;
    narrow(candidates, [&](std::size_t i) { return contains(m.country_hits, gaz.entry(i).country_code); });
    narrow(candidates, [&](std::size_t i) {
      const auto& st = gaz.entry(i).state_code;
      return st && contains(m.state_hits, *st);
    });
    auto better = [&](std::size_t a, std::size_t b) {
      const auto& ea = gaz.entry(a);
      const auto& eb = gaz.entry(b);
      if (ea.population_rank != eb.population_rank) return ea.population_rank > eb.population_rank;
      return std::tie(ea.country_code, ea.city_norm, ea.state_code, ea.lat, ea.lon) <
             std::tie(eb.country_code, eb.city_norm, eb.state_code, eb.lat, eb.lon);
    };
    std::size_t chosen = *std::min_element(candidates.begin(), candidates.end(), better);
    return from_entry(decision.loc_norm, gaz.entry(chosen));
  }

  for (const auto& code : m.country_hits) {
    if (code == "USA") {
      for (const auto& state : m.state_hits) {
        if (auto idx = gaz.centroid(code, state)) return from_entry(decision.loc_norm, gaz.entry(*idx));
      }
    }
    if (auto idx = gaz.centroid(code)) return from_entry(decision.loc_norm, gaz.entry(*idx));
  }
  throw Error(ErrorKind::NoCentroid, "no centroid row for '" + decision.loc_norm + "'");
}

// --- cache -------------------------------------------------------------------

GeocodeCache::GeocodeCache(std::filesystem::path storage) : storage_(std::move(storage)) {
  std::ifstream in(storage_, std::ios::binary);
  if (!in) return;  // a missing cache file is an empty cache
  std::string line;
  while (std::getline(in, line)) {
    if (auto parsed = parse_line(line)) entries_.insert_or_assign(std::move(parsed->first), std::move(parsed->second));
  }
}

std::optional<GeocodeCache::Value> GeocodeCache::lookup(std::string_view loc_norm) const {
  auto it = entries_.find(loc_norm);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void GeocodeCache::store(std::string_view loc_norm, const Value& value) {
  entries_.insert_or_assign(std::string(loc_norm), value);
  if (storage_.empty()) return;
  if (storage_.has_parent_path()) std::filesystem::create_directories(storage_.parent_path());
  std::ofstream out(storage_, std::ios::binary | std::ios::app);
  if (!out) throw Error(ErrorKind::Io, "cannot append to cache " + storage_.string());
  out << format_line(loc_norm, value);
  out.flush();
}

std::string GeocodeCache::format_line(std::string_view loc_norm, const Value& value) {
  std::string line(loc_norm);
  if (!value) return line + "\tMISS\n";
  line += '\t' + io::format_double(value->lat) + '\t' + io::format_double(value->lon) + '\t' + value->country_code +
          '\t' + value->state_code.value_or("") + '\n';
  return line;
}

std::optional<std::pair<std::string, GeocodeCache::Value>> GeocodeCache::parse_line(std::string_view line) {
  if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  if (fields.size() == 2 && fields[1] == "MISS") return std::pair{std::string(fields[0]), Value{}};
  if (fields.size() != 5) return std::nullopt;
  auto lat = io::parse_double(fields[1]);
  auto lon = io::parse_double(fields[2]);
  if (!lat || !lon || !is_alpha3(fields[3])) return std::nullopt;
  ResolvedLocation r;
  r.loc_norm = std::string(fields[0]);
  r.lat = *lat;
  r.lon = *lon;
  r.country_code = std::string(fields[3]);
  if (!fields[4].empty()) r.state_code = std::string(fields[4]);
  r.source = GeocodeSource::Cache;
  return std::pair{std::string(fields[0]), Value{std::move(r)}};
}

// --- rate limiter ---------------------------------------------------------------

RateLimiter::RateLimiter(double requests_per_second, NowFn now, SleepFn sleep)
    : now_(now ? std::move(now) : NowFn([] { return Clock::now(); })),
      sleep_(sleep ? std::move(sleep) : SleepFn([](Clock::duration d) { std::this_thread::sleep_for(d); })) {
  if (!(requests_per_second > 0.0)) throw Error(ErrorKind::InvalidArgument, "requests per second must be positive");
  interval_ = std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(1.0 / requests_per_second));
}

void RateLimiter::acquire() {
  auto now = now_();
  if (next_ && *next_ > now) {
    sleep_(*next_ - now);
    now = *next_;
  }
  next_ = now + interval_;
}

// --- endpoint ----------------------------------------------------------------------

EndpointConfig EndpointConfig::from_env() {
  EndpointConfig config;
  if (const char* url = std::getenv("GEOSENSOR_GEOCODE_URL")) config.url = url;
  if (const char* key = std::getenv("GEOSENSOR_GEOCODE_KEY")) config.key = key;
  return config;
}

HttpGet make_http_transport(const EndpointConfig& config) {
  const std::string& url = config.url;
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos || url.substr(0, scheme_end) != "http") {
    throw Error(ErrorKind::InvalidArgument, "geocode endpoint must be an http:// URL: '" + url + "'");
  }
  auto path_start = url.find('/', scheme_end + 3);
  std::string origin = url.substr(0, path_start);
  std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

  return [origin, path, key = config.key, timeout = config.timeout](std::string_view loc_norm)
             -> std::optional<HttpResponse> {
    httplib::Client client(origin);
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
    auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    httplib::Params params{{"q", std::string(loc_norm)}};
    if (!key.empty()) params.emplace("key", key);
    auto res = client.Get(path, params, httplib::Headers{});
    if (!res) return std::nullopt;
    return HttpResponse{res->status, res->body};
  };
}

ParsedResponse parse_geocode_response(const HttpResponse& response, std::string_view loc_norm) {
  if (response.status == 404) return {ParseOutcome::Miss, std::nullopt};
  if (response.status != 200) return {ParseOutcome::Malformed, std::nullopt};

  auto doc = nlohmann::json::parse(response.body, nullptr, false);
  if (doc.is_discarded()) return {ParseOutcome::Malformed, std::nullopt};
  if (doc.is_null() || (doc.is_object() && doc.empty())) return {ParseOutcome::Miss, std::nullopt};
  if (!doc.is_object()) return {ParseOutcome::Malformed, std::nullopt};

  auto lat = doc.find("lat");
  auto lon = doc.find("lon");
  auto country = doc.find("country_code");
  if (lat == doc.end() || lon == doc.end() || country == doc.end() || !lat->is_number() || !lon->is_number() ||
      !country->is_string()) {
    return {ParseOutcome::Malformed, std::nullopt};
  }
  ResolvedLocation r;
  r.loc_norm = std::string(loc_norm);
  r.lat = lat->get<double>();
  r.lon = lon->get<double>();
  r.country_code = country->get<std::string>();
  if (!(r.lat >= -90.0 && r.lat <= 90.0) || !(r.lon >= -180.0 && r.lon <= 180.0) || !is_alpha3(r.country_code)) {
    return {ParseOutcome::Malformed, std::nullopt};
  }
  if (auto state = doc.find("state_code"); state != doc.end() && state->is_string() && r.country_code == "USA") {
    if (!state->get<std::string>().empty()) r.state_code = state->get<std::string>();
  }
  r.source = GeocodeSource::External;
  return {ParseOutcome::Hit, std::move(r)};
}

ExternalGeocoder::ExternalGeocoder(const Gazetteer& gaz, GeocodeCache& cache, EndpointConfig config,
                                   HttpGet transport, RateLimiter limiter)
    : gaz_(gaz), cache_(cache), config_(std::move(config)), transport_(std::move(transport)),
      limiter_(std::move(limiter)) {}

ResolvedLocation ExternalGeocoder::offline(std::string_view loc_norm) const {
  FilterDecision decision;
  decision.verdict = Verdict::Kept;
  decision.reason = FilterReason::Kept;
  decision.loc_norm = std::string(loc_norm);
  decision.matched = match_tokens(loc_norm, gaz_);
  return resolve_offline(decision, gaz_);
}

ResolvedLocation ExternalGeocoder::resolve(std::string_view loc_norm) {
  std::lock_guard lock(mutex_);
  if (auto cached = cache_.lookup(loc_norm)) {
    ++stats_.cache_hits;
    if (*cached) {
      ResolvedLocation r = **cached;
      r.source = GeocodeSource::Cache;
      return r;
    }
    return offline(loc_norm);
  }

  std::optional<HttpResponse> response;
  for (int attempt = 0; attempt <= config_.retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(config_.retry_backoff * attempt);
    limiter_.acquire();
    ++stats_.http_requests;
    response = transport_(loc_norm);
    if (response && response->status < 500) break;
  }
  if (!response || response->status >= 500) {
    ++stats_.unreachable;
    return offline(loc_norm);
  }

  ParsedResponse parsed = parse_geocode_response(*response, loc_norm);
  if (parsed.outcome == ParseOutcome::Hit && !gaz_.has_country_code(parsed.location->country_code)) {
    parsed = {ParseOutcome::Malformed, std::nullopt};
  }
  switch (parsed.outcome) {
    case ParseOutcome::Hit:
      cache_.store(loc_norm, parsed.location);
      return *parsed.location;
    case ParseOutcome::Miss:
      ++stats_.misses;
      cache_.store(loc_norm, std::nullopt);
      return offline(loc_norm);
    case ParseOutcome::Malformed:
      break;
  }
  ++stats_.malformed;
  return offline(loc_norm);
}

// --- batch ----------------------------------------------------------------------------

BatchResolution resolve_batch(const std::vector<FilteredRecord>& kept, GeocodeMode mode, const Gazetteer& gaz,
                              ExternalGeocoder* external) {
  if (mode == GeocodeMode::External && external == nullptr) {
    throw Error(ErrorKind::InvalidArgument, "external geocoding mode without a configured endpoint");
  }
  BatchResolution out;
  for (const auto& item : kept) {
    try {
      ResolvedLocation loc = mode == GeocodeMode::External ? external->resolve(item.decision.loc_norm)
                                                           : resolve_offline(item.decision, gaz);
      out.resolved.push_back({item.record, std::move(loc)});
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoCentroid) throw;
      ++out.skipped;
    }
  }
  return out;
}

std::string format_resolution_rate(std::size_t resolved, std::size_t all_tweets) {
  return std::to_string(resolved) + " geo-coordinates (" + format_percent(resolved, all_tweets) + "% of all tweets)";
}

}  // namespace geosensor
