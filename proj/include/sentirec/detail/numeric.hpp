#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>

namespace sentirec::detail {

inline double round_half_up(double x) { return std::floor(x + 0.5); }

/// Decimal text with 17 significant digits; parses back to the same double.
inline std::string exact_decimal(double x) {
  char buf[40];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", x);
  return std::string(buf, static_cast<std::size_t>(len));
}

inline std::string fixed(double x, int places) {
  char buf[64];
  const int len = std::snprintf(buf, sizeof buf, "%.*f", places, x);
  return std::string(buf, static_cast<std::size_t>(len));
}

inline std::optional<double> parse_double(std::string_view text) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return value;
}

template <typename Int>
std::optional<Int> parse_int(std::string_view text) {
  Int value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return value;
}

}  // namespace sentirec::detail
