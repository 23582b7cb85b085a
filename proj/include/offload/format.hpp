#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace offload {

/// Locale-independent decimal rendering with a fixed number of significant
/// digits.  All CSV and JSON the tools emit goes through this.
inline std::string format_double(double value, int significant_digits) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[64];
  const auto res = std::to_chars(buffer, buffer + sizeof(buffer), value,
                                 std::chars_format::general, significant_digits);
  return std::string(buffer, res.ptr);
}

}  // namespace offload
