#pragma once

// Rule-based section segmentation of extracted decision lines.
//
// A cursor starts in the Tenor section. A line that is, in full, one of the
// vocabulary headers (compact "Tatbestand" or spaced "T a t b e s t a n d",
// any case, optional trailing colons) switches the cursor and is consumed.
// Every other line goes to the cursor's section. Lines gathered under
// "Gründe" are split afterwards: "I." ... "II." ... maps to Tatbestand and
// Entscheidungsgründe, an undivided Gründe block is Entscheidungsgründe.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace olseg {

enum class SectionMarker { tenor, tatbestand, entscheidungsgruende, gruende, rechtsmittelbelehrung };

std::string_view to_string(SectionMarker m);

/// Marker for a line that is exactly one vocabulary header.
std::optional<SectionMarker> match_header(std::string_view line);

/// Value 1..10 if the line is a full-line Roman numeral marker ("II.", "IV").
std::optional<int> match_roman_marker(std::string_view line);

/// Where an input line ended up.
enum class Placement {
  tenor,
  tatbestand,
  entscheidungsgruende,
  rechtsmittelbelehrung,
  header,        // consumed section header
  roman_marker,  // consumed "I."/"II."/... of a split Gründe block
};

struct Segments {
  std::vector<std::string> tenor;
  std::vector<std::string> tatbestand;
  std::vector<std::string> entscheidungsgruende;
  std::vector<std::string> rechtsmittelbelehrung;
  // placement[i] describes input line i
  std::vector<Placement> placement;
  // headers seen more than once (reported, not an error)
  std::vector<SectionMarker> repeated_headers;
};

struct GruendeSplit {
  std::vector<Placement> placement;  // one entry per Gründe line
  bool divided = false;
};

/// Split rule for a Gründe block. Placements are tatbestand,
/// entscheidungsgruende or roman_marker.
GruendeSplit split_gruende_placement(std::span<const std::string> lines);

/// Convenience form returning (tatbestand, entscheidungsgruende).
std::pair<std::vector<std::string>, std::vector<std::string>> split_gruende(std::span<const std::string> lines);

Segments segment(std::span<const std::string> lines);

/// Lines joined with '\n'.
std::string join_lines(std::span<const std::string> lines);

}  // namespace olseg
