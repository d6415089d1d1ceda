#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace geosensor::fixture {

inline constexpr std::uint64_t kDefaultSeed = 20200127;

// Synthetic inputs for the three diseases: a gazetteer with 12 countries and
// 12 US states, rectangle boundaries, and per-disease tweets, paper ids,
// paper counts and burden tables. CHE and AUS have no burden rows; MT and WY
// get no tweets. The output is a pure function of the seed.
//
// Returns the written paths relative to `dir`, sorted.
std::vector<std::string> write_fixture(const std::filesystem::path& dir, std::uint64_t seed = kDefaultSeed);

}  // namespace geosensor::fixture
