#pragma once

#include <cstdint>
#include <string>

namespace geosensor {

// 100 * num / den rounded half-up to one decimal, returned in tenths of a
// percent. Integer arithmetic so 48.85 style ties never drift. 0 when den == 0.
constexpr std::int64_t percent_tenths(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return 0;
  return static_cast<std::int64_t>((2000 * num + den) / (2 * den));
}

inline double percent_one_decimal(std::uint64_t num, std::uint64_t den) {
  return static_cast<double>(percent_tenths(num, den)) / 10.0;
}

inline std::string format_percent(std::uint64_t num, std::uint64_t den) {
  auto t = percent_tenths(num, den);
  return std::to_string(t / 10) + "." + std::to_string(t % 10);
}

}  // namespace geosensor
