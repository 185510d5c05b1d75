#pragma once

// Turns the HTML `content` of a decision into normalized text lines.
//
// Only p, h1-h4, td and the dump-specific rd element produce text. Text
// belongs to its innermost enclosing allowed element, so nested allowed
// elements (a p inside a td) never emit the same passage twice. Empty lines
// and lines equal to the immediately preceding line are dropped.

#include <string>
#include <string_view>
#include <vector>

namespace olseg {

enum class SourceTag { p, h1, h2, h3, h4, td, rd };

std::string_view to_string(SourceTag tag);

struct ExtractedLine {
  std::string text;
  SourceTag source_tag = SourceTag::p;

  bool operator==(const ExtractedLine&) const = default;
};

struct ExtractResult {
  std::vector<ExtractedLine> lines;
  std::vector<std::string> warnings;
};

/// Whitespace collapsing and trimming, see text::normalize_line.
std::string normalize_line(std::string_view raw);

/// Decode one HTML character reference body (without '&' and ';'), e.g.
/// "auml", "#228", "#xE4". Returns an empty string when unknown.
std::string decode_entity(std::string_view name);

/// Lenient extraction; never throws.
ExtractResult extract_lines(std::string_view html);

/// Just the texts of extract_lines().
std::vector<std::string> extract_texts(std::string_view html);

}  // namespace olseg
