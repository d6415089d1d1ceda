#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "geosensor/gazetteer.hpp"
#include "geosensor/location_filter.hpp"
#include "geosensor/tweet.hpp"

namespace geosensor {

enum class GeocodeSource { Offline, External, Cache };
std::string_view to_string(GeocodeSource source);

struct ResolvedLocation {
  std::string loc_norm;
  double lat = 0.0;
  double lon = 0.0;
  std::string country_code;
  std::optional<std::string> state_code;  // only when country_code == "USA"
  GeocodeSource source = GeocodeSource::Offline;

  bool operator==(const ResolvedLocation&) const = default;
};

/// Picks one gazetteer row for a kept location. Cities beat countries; among
/// cities the order is: country named in the string, then state named in the
/// string, then uniqueness, then highest population_rank, then the
/// lexicographic (country_code, city, state, lat, lon) order. Country-only
/// strings resolve to the state centroid (US with a state named) or the
/// country centroid. Throws Error(NoCentroid) when no centroid row exists.
ResolvedLocation resolve_offline(const FilterDecision& decision, const Gazetteer& gaz);

// --- cache ------------------------------------------------------------------

/// Append-only TSV cache keyed by normalized location. Each line is
/// `loc_norm\tlat\tlon\tcountry\tstate` or `loc_norm\tMISS`; later lines win.
class GeocodeCache {
 public:
  // nullopt inner value = a stored miss.
  using Value = std::optional<ResolvedLocation>;

  GeocodeCache() = default;
  explicit GeocodeCache(std::filesystem::path storage);

  std::optional<Value> lookup(std::string_view loc_norm) const;
  void store(std::string_view loc_norm, const Value& value);

  std::size_t size() const { return entries_.size(); }
  const std::filesystem::path& storage() const { return storage_; }

  static std::string format_line(std::string_view loc_norm, const Value& value);
  // Returns the key and value, or nullopt for an unparseable line.
  static std::optional<std::pair<std::string, Value>> parse_line(std::string_view line);

 private:
  std::filesystem::path storage_;
  std::map<std::string, Value, std::less<>> entries_;
};

// --- external endpoint -------------------------------------------------------

class RateLimiter {
 public:
  using Clock = std::chrono::steady_clock;
  using NowFn = std::function<Clock::time_point()>;
  using SleepFn = std::function<void(Clock::duration)>;

  explicit RateLimiter(double requests_per_second, NowFn now = nullptr, SleepFn sleep = nullptr);

  // Blocks until the next request slot.
  void acquire();

 private:
  Clock::duration interval_;
  std::optional<Clock::time_point> next_;
  NowFn now_;
  SleepFn sleep_;
};

struct EndpointConfig {
  std::string url;  // http://host[:port]/path
  std::string key;
  double requests_per_second = 1.0;
  int retries = 2;
  std::chrono::milliseconds timeout{5000};
  std::chrono::milliseconds retry_backoff{200};

  // Reads GEOSENSOR_GEOCODE_URL and GEOSENSOR_GEOCODE_KEY.
  static EndpointConfig from_env();
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

// Issues `GET <endpoint>?q=<loc_norm>[&key=...]`; nullopt on transport failure.
using HttpGet = std::function<std::optional<HttpResponse>(std::string_view loc_norm)>;

HttpGet make_http_transport(const EndpointConfig& config);

enum class ParseOutcome { Hit, Miss, Malformed };
struct ParsedResponse {
  ParseOutcome outcome = ParseOutcome::Malformed;
  std::optional<ResolvedLocation> location;
};

// 404, JSON null or an empty object are misses; an object with numeric
// in-range lat/lon and an alpha-3 country_code is a hit.
ParsedResponse parse_geocode_response(const HttpResponse& response, std::string_view loc_norm);

struct ExternalStats {
  std::size_t http_requests = 0;
  std::size_t cache_hits = 0;
  std::size_t unreachable = 0;
  std::size_t malformed = 0;
  std::size_t misses = 0;
};

class ExternalGeocoder {
 public:
  ExternalGeocoder(const Gazetteer& gaz, GeocodeCache& cache, EndpointConfig config, HttpGet transport,
                   RateLimiter limiter);

  // Cache first, then one rate-limited request (with retries on transport
  // failure). Falls back to offline resolution on misses and errors.
  ResolvedLocation resolve(std::string_view loc_norm);

  const ExternalStats& stats() const { return stats_; }

 private:
  ResolvedLocation offline(std::string_view loc_norm) const;

  const Gazetteer& gaz_;
  GeocodeCache& cache_;
  EndpointConfig config_;
  HttpGet transport_;
  RateLimiter limiter_;
  ExternalStats stats_;
  std::mutex mutex_;
};

// --- batch -------------------------------------------------------------------

enum class GeocodeMode { Offline, External };

struct ResolvedTweet {
  TweetRecord record;
  ResolvedLocation location;
};

struct BatchResolution {
  std::vector<ResolvedTweet> resolved;
  std::size_t skipped = 0;
};

// `external` is required when mode == External.
BatchResolution resolve_batch(const std::vector<FilteredRecord>& kept, GeocodeMode mode, const Gazetteer& gaz,
                              ExternalGeocoder* external = nullptr);

// "<n> geo-coordinates (<pct>% of all tweets)", percent to one decimal.
std::string format_resolution_rate(std::size_t resolved, std::size_t all_tweets);

}  // namespace geosensor
