#pragma once

// Thin UTF-8 helpers over ICU's code point properties.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <unicode/uchar.h>
#include <unicode/utf8.h>

namespace topicmine::unicode {

// Byte offset of the first invalid sequence, or nullopt when the input is
// well-formed UTF-8.
inline std::optional<std::size_t> first_invalid_byte(std::string_view s) {
  const auto* p = reinterpret_cast<const uint8_t*>(s.data());
  const auto len = static_cast<int32_t>(s.size());
  int32_t i = 0;
  while (i < len) {
    const int32_t start = i;
    UChar32 c;
    U8_NEXT(p, i, len, c);
    if (c < 0) return static_cast<std::size_t>(start);
  }
  return std::nullopt;
}

inline bool is_valid_utf8(std::string_view s) { return !first_invalid_byte(s).has_value(); }

// Calls fn(code_point, byte_offset, byte_length) for every code point.
// Invalid sequences are reported as U+FFFD so callers can treat them as
// separators without mutating the source text.
template <typename Fn>
void for_each_code_point(std::string_view s, Fn&& fn) {
  const auto* p = reinterpret_cast<const uint8_t*>(s.data());
  const auto len = static_cast<int32_t>(s.size());
  int32_t i = 0;
  while (i < len) {
    const int32_t start = i;
    UChar32 c;
    U8_NEXT(p, i, len, c);
    if (c < 0) c = 0xFFFD;
    fn(static_cast<char32_t>(c), static_cast<std::size_t>(start), static_cast<std::size_t>(i - start));
  }
}

inline void append(std::string& out, char32_t c) {
  uint8_t buf[U8_MAX_LENGTH];
  int32_t n = 0;
  U8_APPEND_UNSAFE(buf, n, static_cast<UChar32>(c));
  out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(n));
}

inline bool is_letter_or_digit(char32_t c) {
  return u_isalpha(static_cast<UChar32>(c)) || u_isdigit(static_cast<UChar32>(c));
}
inline bool is_digit(char32_t c) { return u_isdigit(static_cast<UChar32>(c)); }
inline bool is_punct(char32_t c) { return u_ispunct(static_cast<UChar32>(c)); }
inline bool is_space(char32_t c) { return u_isUWhiteSpace(static_cast<UChar32>(c)); }
inline char32_t to_lower(char32_t c) { return static_cast<char32_t>(u_tolower(static_cast<UChar32>(c))); }

// Apostrophes and hyphens that may sit inside a token.
inline bool is_joiner(char32_t c) {
  return c == U'\'' || c == U'-' || c == U'’' || c == U'‐' || c == U'‑';
}

inline std::string to_lower(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for_each_code_point(s, [&](char32_t c, std::size_t, std::size_t) { append(out, to_lower(c)); });
  return out;
}

inline bool contains_space(std::string_view s) {
  bool found = false;
  for_each_code_point(s, [&](char32_t c, std::size_t, std::size_t) { found = found || is_space(c); });
  return found;
}

}  // namespace topicmine::unicode
