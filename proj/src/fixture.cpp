#include "geosensor/fixture.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include <json.hpp>

#include "geosensor/csv.hpp"
#include "geosensor/io.hpp"

namespace geosensor::fixture {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct City {
  const char* name;
  double lat;
  double lon;
  int rank;
};

struct Place {
  const char* code;
  const char* name;
  double lat;
  double lon;
  std::vector<City> cities;
};

const std::vector<Place>& countries() {
  static const std::vector<Place> table = {
      {"AUS", "Australia", -25.3, 133.8, {{"Sydney", -33.869, 151.209, 9}, {"Springfield", -27.653, 152.917, 1}}},
      {"BRA", "Brazil", -10.8, -52.9, {{"São Paulo", -23.55, -46.633, 10}, {"Rio de Janeiro", -22.907, -43.173, 9}}},
      {"CHE", "Switzerland", 46.8, 8.2, {{"Geneva", 46.204, 6.143, 7}, {"Zurich", 47.377, 8.541, 8}}},
      {"DEU", "Germany", 51.1, 10.4, {{"Berlin", 52.52, 13.405, 9}, {"München", 48.137, 11.575, 7}}},
      {"FRA", "France", 46.6, 2.2, {{"Paris", 48.857, 2.352, 9}, {"Lyon", 45.76, 4.835, 5}}},
      {"GBR", "United Kingdom", 54.0, -2.0, {{"London", 51.507, -0.128, 9}, {"Manchester", 53.48, -2.24, 5}}},
      {"GHA", "Ghana", 7.9, -1.0, {{"Accra", 5.604, -0.187, 9}, {"Kumasi", 6.688, -1.624, 6}}},
      {"IND", "India", 22.0, 79.0, {{"New Delhi", 28.614, 77.209, 9}, {"Mumbai", 19.076, 72.878, 10}}},
      {"KEN", "Kenya", 0.2, 37.9, {{"Nairobi", -1.286, 36.817, 9}, {"Mombasa", -4.043, 39.668, 5}}},
      {"NGA", "Nigeria", 9.1, 8.7, {{"Lagos", 6.524, 3.379, 9}, {"Abuja", 9.076, 7.398, 6}}},
      {"USA", "United States", 39.8, -98.6, {}},
      {"ZAF", "South Africa", -29.0, 24.0, {{"Johannesburg", -26.204, 28.047, 9}, {"Cape Town", -33.925, 18.424, 8}}},
  };
  return table;
}

const std::vector<Place>& states() {
  static const std::vector<Place> table = {
      {"CA", "California", 36.8, -119.4, {{"Los Angeles", 34.052, -118.244, 10}, {"San Francisco", 37.775, -122.419, 8}}},
      {"FL", "Florida", 27.99, -81.76, {{"Miami", 25.762, -80.192, 8}, {"Orlando", 28.538, -81.379, 7}}},
      {"GA", "Georgia", 32.7, -83.4, {{"Atlanta", 33.749, -84.388, 9}, {"Savannah", 32.081, -81.091, 4}}},
      {"IL", "Illinois", 40.0, -89.0, {{"Chicago", 41.878, -87.63, 10}, {"Springfield", 39.781, -89.65, 4}}},
      {"MA", "Massachusetts", 42.4, -71.8, {{"Boston", 42.36, -71.059, 9}, {"Worcester", 42.263, -71.802, 4}}},
      {"MT", "Montana", 47.0, -109.6, {{"Billings", 45.783, -108.501, 4}}},
      {"NY", "New York", 43.0, -75.0, {{"New York", 40.713, -74.006, 10}, {"Buffalo", 42.886, -78.878, 5}}},
      {"OH", "Ohio", 40.3, -82.8, {{"Columbus", 39.961, -82.999, 8}, {"Cleveland", 41.499, -81.694, 7}}},
      {"PA", "Pennsylvania", 41.0, -77.6, {{"Philadelphia", 39.953, -75.165, 9}, {"Pittsburgh", 40.441, -79.996, 7}}},
      {"TX", "Texas", 31.0, -99.9, {{"Houston", 29.76, -95.37, 9}, {"Austin", 30.267, -97.743, 7}}},
      {"WA", "Washington", 47.4, -120.5, {{"Seattle", 47.606, -122.332, 9}, {"Spokane", 47.659, -117.426, 5}}},
      {"WY", "Wyoming", 43.0, -107.5, {{"Cheyenne", 41.14, -104.82, 3}}},
  };
  return table;
}

// Regions left without burden rows and states left without tweets.
const std::vector<std::string> kNoBurden = {"AUS", "CHE"};
const std::vector<std::string> kSilentStates = {"MT", "WY"};

// Strings that the filter drops, plus a few that pass it.
const std::vector<std::string> kNoise = {
    "Worldwide", "Everywhere", "Not from here", "www.tbfacts.org", "http://example.org/lab",
    "Washington DC & New Delhi", "mostly nucleus", "Ber", "NYC", "", "somewhere nice", "Planet Earth",
    "Lagos", "Texas", "Paris and London", "Berlin und Hamburg", "Madrid y Barcelona", "bcnvcia",
    "in your timeline", "Greenland"};

struct Disease {
  const char* name;
  int papers;
  double burden_mu;
  double burden_sd;
  int decimals;
  std::vector<int> years;
};

const std::vector<Disease>& diseases() {
  static const std::vector<Disease> table = {
      {"tb", 240, 9.0, 1.5, 0, {2010, 2011, 2012, 2013, 2014, 2015, 2016, 2017, 2018}},
      {"malaria", 180, 3.0, 1.2, 2, {2010, 2011, 2012, 2013, 2014, 2015, 2016, 2017, 2018}},
      {"hiv", 300, 9.5, 1.3, 0, {2010, 2014, 2018}},
  };
  return table;
}

// Year gaps that exercise the restricted-mean and single-year fallbacks.
bool dropped_year(std::string_view disease, std::string_view code, int year) {
  if (disease == "tb" && code == "NGA") return year == 2013 || year == 2015;
  if (disease == "malaria" && code == "KEN") return year == 2011;
  if (disease == "hiv" && code == "GHA") return year == 2010;
  if (disease == "hiv" && code == "KEN") return year == 2018;
  if (disease == "hiv" && code == "MT") return year == 2016;
  return false;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() {
    double u1 = 1.0 - uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  std::size_t index(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

  // Knuth's multiplication method in chunks of at most 30.
  std::int64_t poisson(double lambda) {
    std::int64_t total = 0;
    while (lambda > 0) {
      double chunk = std::min(lambda, 30.0);
      lambda -= chunk;
      const double limit = std::exp(-chunk);
      std::int64_t k = 0;
      double p = 1.0;
      do {
        ++k;
        p *= uniform();
      } while (p > limit);
      total += k - 1;
    }
    return total;
  }

 private:
  std::mt19937_64 engine_;
};

std::string lower(std::string s) {
  for (char& c : s) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return s;
}

std::vector<double> zscores(const std::vector<double>& v) {
  if (v.empty()) return {};
  double mean = 0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0;
  for (double x : v) ss += (x - mean) * (x - mean);
  double sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 1.0;
  std::vector<double> out;
  for (double x : v) out.push_back(sd > 0 ? (x - mean) / sd : 0.0);
  return out;
}

json rectangle(double lon0, double lon1, double lat0, double lat1) {
  return json::array({json::array({{lon0, lat0}, {lon1, lat0}, {lon1, lat1}, {lon0, lat1}, {lon0, lat0}})});
}

json feature(const std::string& code, json geometry) {
  return {{"type", "Feature"}, {"properties", {{"region_code", code}}}, {"geometry", std::move(geometry)}};
}

std::string country_location(Rng& rng, const Place& c) {
  const City& city = c.cities[rng.index(c.cities.size())];
  std::string name = city.name;
  switch (rng.index(5)) {
    case 0: return name + ", " + c.name;
    case 1: return lower(name + ", " + c.name);
    case 2: return name + " " + c.name;
    case 3: return c.name;
    default: return std::string(c.code) == "GBR" ? name + ", UK" : name + " - " + c.name + "!";
  }
}

std::string state_location(Rng& rng, const Place& s) {
  const City& city = s.cities[rng.index(s.cities.size())];
  std::string name = city.name;
  switch (rng.index(5)) {
    case 0: return name + ", " + s.name + ", USA";
    case 1: return name + ", USA";
    case 2: return std::string(s.name) + ", USA";
    case 3: return name + ", " + s.name + ", United States";
    default: return lower(name) + " usa";
  }
}

struct Tweet {
  std::string location;
  bool precise = false;
};

struct Written {
  fs::path dir;
  std::vector<std::string> names;

  void put(const std::string& name, const std::string& text) {
    io::write_atomic(dir / name, text);
    names.push_back(name);
  }
};

std::string burden_value(double v, int decimals) {
  return decimals == 0 ? std::to_string(static_cast<std::int64_t>(std::llround(v))) : io::format_fixed(v, decimals);
}

}  // namespace

std::vector<std::string> write_fixture(const fs::path& dir, std::uint64_t seed) {
  Rng rng(seed);
  Written out{dir, {}};

  // gazetteer
  std::string gaz = csv::format_row({"city", "country", "country_code", "state_code", "lat", "lon", "population_rank"});
  for (const auto& c : countries()) {
    gaz += csv::format_row({"", c.name, c.code, "", io::format_double(c.lat), io::format_double(c.lon), "0"});
    for (const auto& city : c.cities) {
      gaz += csv::format_row({city.name, c.name, c.code, "", io::format_double(city.lat), io::format_double(city.lon),
                              std::to_string(city.rank)});
    }
  }
  for (const auto& s : states()) {
    gaz += csv::format_row({"", "United States", "USA", s.code, io::format_double(s.lat), io::format_double(s.lon), "0"});
    for (const auto& city : s.cities) {
      gaz += csv::format_row({city.name, "United States", "USA", s.code, io::format_double(city.lat),
                              io::format_double(city.lon), std::to_string(city.rank)});
    }
  }
  out.put("gazetteer.csv", gaz);

  // boundaries
  json world = json::array();
  for (const auto& c : countries()) {
    if (std::string(c.code) == "USA") {
      json multi = json::array({rectangle(-125, -66, 24, 50), rectangle(-170, -140, 55, 71)});
      world.push_back(feature(c.code, {{"type", "MultiPolygon"}, {"coordinates", multi}}));
    } else {
      world.push_back(
          feature(c.code, {{"type", "Polygon"}, {"coordinates", rectangle(c.lon - 6, c.lon + 6, c.lat - 4, c.lat + 4)}}));
    }
  }
  world.push_back(feature("GRL", {{"type", "Polygon"}, {"coordinates", rectangle(-55, -20, 60, 83)}}));
  out.put("boundaries_world.geojson", json{{"type", "FeatureCollection"}, {"features", world}}.dump(1) + "\n");

  json us = json::array();
  for (const auto& s : states()) {
    us.push_back(
        feature(s.code, {{"type", "Polygon"}, {"coordinates", rectangle(s.lon - 3, s.lon + 3, s.lat - 2, s.lat + 2)}}));
  }
  out.put("boundaries_us.geojson", json{{"type", "FeatureCollection"}, {"features", us}}.dump(1) + "\n");

  for (const auto& d : diseases()) {
    const std::string name = d.name;
    const bool us_panel = name == "hiv";

    // Paper ids and per-region paper counts.
    std::string ids;
    char buf[32];
    for (int i = 1; i <= d.papers; ++i) {
      std::snprintf(buf, sizeof buf, "%s-%04d", d.name, i);
      ids += std::string(buf) + "\n";
    }
    out.put(name + "/paper_ids.txt", ids);

    auto draw_papers = [&](double mu, double sd) {
      return std::max<std::int64_t>(1, std::llround(std::exp(mu + sd * rng.normal())));
    };
    std::vector<std::int64_t> papers;
    std::string papers_csv = csv::format_row({"region_code", "papers"});
    for (const auto& c : countries()) {
      papers.push_back(draw_papers(3.5, 1.0));
      papers_csv += csv::format_row({c.code, std::to_string(papers.back())});
    }
    out.put(name + "/paper_counts.csv", papers_csv);

    // Burden, one base level per region with mild year-to-year drift.
    auto burden_table = [&](const std::vector<Place>& places, double mu, double sd, const std::vector<int>& years,
                            std::vector<double>& log_level) {
      std::string text = csv::format_row({"region_code", "year", "value"});
      for (const auto& p : places) {
        double base = mu + sd * rng.normal();
        log_level.push_back(base);
        if (std::find(kNoBurden.begin(), kNoBurden.end(), p.code) != kNoBurden.end()) continue;
        for (int y : years) {
          double v = std::exp(base + 0.03 * (y - 2014) + 0.05 * rng.normal());
          if (dropped_year(name, p.code, y)) continue;
          text += csv::format_row({p.code, std::to_string(y), burden_value(v, d.decimals)});
        }
      }
      return text;
    };
    std::vector<double> log_burden;
    out.put(name + "/burden.csv", burden_table(countries(), d.burden_mu, d.burden_sd, d.years, log_burden));

    std::vector<double> state_log_burden;
    std::vector<std::int64_t> state_papers;
    if (us_panel) {
      std::string sp = csv::format_row({"region_code", "papers"});
      for (const auto& s : states()) {
        state_papers.push_back(draw_papers(2.5, 0.8));
        sp += csv::format_row({s.code, std::to_string(state_papers.back())});
      }
      out.put(name + "/paper_counts_us.csv", sp);
      out.put(name + "/burden_us.csv", burden_table(states(), 7.0, 1.0, {2016, 2017}, state_log_burden));
    }

    // Tweets: log-linear in standardized log burden and log papers.
    std::vector<double> log_papers;
    for (auto p : papers) log_papers.push_back(std::log(static_cast<double>(p)));
    auto zb = zscores(log_burden);
    auto zp = zscores(log_papers);

    std::vector<Tweet> tweets;
    auto emit = [&](std::string location) { tweets.push_back({std::move(location), rng.uniform() < 0.1}); };
    for (std::size_t i = 0; i < countries().size(); ++i) {
      const Place& c = countries()[i];
      if (std::string(c.code) == "USA") continue;
      bool has_burden = std::find(kNoBurden.begin(), kNoBurden.end(), c.code) == kNoBurden.end();
      double lambda = 10.0 * std::exp(0.45 * (has_burden ? zb[i] : 0.0) + 0.35 * zp[i]);
      std::int64_t n = std::max<std::int64_t>(1, rng.poisson(lambda));
      // The first tweet always resolves so every country appears.
      emit(std::string(c.cities.front().name) + ", " + c.name);
      for (std::int64_t k = 1; k < n; ++k) emit(country_location(rng, c));
    }

    std::vector<double> szb = zscores(state_log_burden);
    std::vector<double> szp;
    {
      std::vector<double> lp;
      for (auto p : state_papers) lp.push_back(std::log(static_cast<double>(p)));
      szp = zscores(lp);
    }
    for (std::size_t i = 0; i < states().size(); ++i) {
      const Place& s = states()[i];
      if (std::find(kSilentStates.begin(), kSilentStates.end(), s.code) != kSilentStates.end()) continue;
      double eta = us_panel ? 0.5 * szb[i] + 0.3 * szp[i] : 0.3 * rng.normal();
      std::int64_t n = std::max<std::int64_t>(1, rng.poisson(4.0 * std::exp(eta)));
      emit(std::string(s.cities.front().name) + ", " + s.name + ", USA");
      for (std::int64_t k = 1; k < n; ++k) emit(state_location(rng, s));
    }

    const std::size_t clean = tweets.size();
    const std::size_t noise = clean * 35 / 100;
    for (std::size_t k = 0; k < noise; ++k) emit(kNoise[rng.index(kNoise.size())]);

    for (std::size_t i = tweets.size(); i > 1; --i) std::swap(tweets[i - 1], tweets[rng.index(i)]);

    std::string tweets_csv = csv::format_row({"tweet_id", "paper_id", "raw_location", "has_precise_geo"});
    for (std::size_t i = 0; i < tweets.size(); ++i) {
      double u = rng.uniform();
      int paper = 1 + static_cast<int>(u * u * d.papers);
      std::snprintf(buf, sizeof buf, "%s-t%05zu", d.name, i + 1);
      std::string tid = buf;
      std::snprintf(buf, sizeof buf, "%s-%04d", d.name, paper);
      tweets_csv += csv::format_row({tid, buf, tweets[i].location, tweets[i].precise ? "1" : "0"});
    }
    out.put(name + "/tweets.csv", tweets_csv);
  }

  std::sort(out.names.begin(), out.names.end());
  return out.names;
}

}  // namespace geosensor::fixture
