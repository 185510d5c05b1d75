#pragma once

// Small UTF-8 helpers used by the extractor, the header matcher and the
// citation scanner.

#include <cstddef>
#include <string>
#include <string_view>

namespace olseg::text {

struct CodePoint {
  char32_t value = 0;
  std::size_t length = 1;  // bytes consumed
  bool valid = false;      // false: value is the raw byte
};

/// Decode the code point starting at s[pos]. Invalid sequences consume one
/// byte and are reported with valid=false.
CodePoint decode(std::string_view s, std::size_t pos);

void append_utf8(std::string& out, char32_t cp);

/// Unicode White_Space (includes U+00A0 and the other no-break spaces).
bool is_space(char32_t cp);

/// Collapse every whitespace run to one ASCII space and trim both ends.
/// Bytes that are not valid UTF-8 are copied through unchanged.
std::string normalize_line(std::string_view raw);

/// Lowercase ASCII and the Latin-1 uppercase letters (Ä Ö Ü ...).
std::string to_lower(std::string_view s);

}  // namespace olseg::text
