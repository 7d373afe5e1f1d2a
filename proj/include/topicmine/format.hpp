#pragma once

// Small text-output helpers shared by the CSV/JSON exporters.

#include <charconv>
#include <string>
#include <string_view>
#include <system_error>

namespace topicmine::fmt {

// Shortest representation that parses back to the same double.
inline std::string num(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace topicmine::fmt
