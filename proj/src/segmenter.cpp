#include "olseg/segmenter.hpp"

#include <array>

#include "olseg/text.hpp"

namespace olseg {

std::string_view to_string(SectionMarker m) {
  switch (m) {
    case SectionMarker::tenor: return "tenor";
    case SectionMarker::tatbestand: return "tatbestand";
    case SectionMarker::entscheidungsgruende: return "entscheidungsgruende";
    case SectionMarker::gruende: return "gruende";
    case SectionMarker::rechtsmittelbelehrung: return "rechtsmittelbelehrung";
  }
  return "tenor";
}

namespace {

struct VocabularyEntry {
  std::string_view word;  // lowercase UTF-8
  std::string spaced;     // code points separated by single spaces
  SectionMarker marker;
};

std::string spaced_form(std::string_view word) {
  std::string out;
  for (std::size_t i = 0; i < word.size();) {
    const auto cp = text::decode(word, i);
    if (!out.empty()) out.push_back(' ');
    out.append(word.substr(i, cp.length));
    i += cp.length;
  }
  return out;
}

const std::array<VocabularyEntry, 5>& vocabulary() {
  static const std::array<VocabularyEntry, 5> vocab{{
      {"tenor", spaced_form("tenor"), SectionMarker::tenor},
      {"tatbestand", spaced_form("tatbestand"), SectionMarker::tatbestand},
      {"entscheidungsgründe", spaced_form("entscheidungsgründe"), SectionMarker::entscheidungsgruende},
      {"gründe", spaced_form("gründe"), SectionMarker::gruende},
      {"rechtsmittelbelehrung", spaced_form("rechtsmittelbelehrung"), SectionMarker::rechtsmittelbelehrung},
  }};
  return vocab;
}

Placement placement_for(SectionMarker m) {
  switch (m) {
    case SectionMarker::tenor: return Placement::tenor;
    case SectionMarker::tatbestand: return Placement::tatbestand;
    case SectionMarker::rechtsmittelbelehrung: return Placement::rechtsmittelbelehrung;
    case SectionMarker::entscheidungsgruende:
    case SectionMarker::gruende: return Placement::entscheidungsgruende;
  }
  return Placement::tenor;
}

}  // namespace

std::optional<SectionMarker> match_header(std::string_view line) {
  // Normalizing makes every whitespace run a single space, so the spaced
  // form reduces to an exact comparison.
  std::string body = text::to_lower(text::normalize_line(line));
  while (!body.empty() && body.back() == ':') body.pop_back();
  while (!body.empty() && body.back() == ' ') body.pop_back();
  if (body.empty()) return std::nullopt;
  for (const auto& entry : vocabulary()) {
    if (body == entry.word || body == entry.spaced) return entry.marker;
  }
  return std::nullopt;
}

std::optional<int> match_roman_marker(std::string_view line) {
  static constexpr std::array<std::string_view, 10> numerals{"I", "II", "III", "IV", "V",
                                                             "VI", "VII", "VIII", "IX", "X"};
  std::string body = text::normalize_line(line);
  if (!body.empty() && body.back() == '.') body.pop_back();
  while (!body.empty() && body.back() == ' ') body.pop_back();
  for (std::size_t i = 0; i < numerals.size(); ++i) {
    if (body == numerals[i]) return static_cast<int>(i) + 1;
  }
  return std::nullopt;
}

GruendeSplit split_gruende_placement(std::span<const std::string> lines) {
  GruendeSplit split;
  split.placement.assign(lines.size(), Placement::entscheidungsgruende);

  std::optional<std::size_t> first;
  std::optional<std::size_t> second;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto numeral = match_roman_marker(lines[i]);
    if (!first && numeral == 1) {
      first = i;
    } else if (first && numeral == 2) {
      second = i;
      break;
    }
  }
  if (!first || !second) return split;

  split.divided = true;
  for (std::size_t i = 0; i < *second; ++i) split.placement[i] = Placement::tatbestand;
  split.placement[*first] = Placement::roman_marker;
  for (std::size_t i = *second; i < lines.size(); ++i) {
    if (match_roman_marker(lines[i])) split.placement[i] = Placement::roman_marker;
  }
  return split;
}

std::pair<std::vector<std::string>, std::vector<std::string>> split_gruende(std::span<const std::string> lines) {
  const GruendeSplit split = split_gruende_placement(lines);
  std::pair<std::vector<std::string>, std::vector<std::string>> out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (split.placement[i] == Placement::tatbestand) out.first.push_back(lines[i]);
    if (split.placement[i] == Placement::entscheidungsgruende) out.second.push_back(lines[i]);
  }
  return out;
}

Segments segment(std::span<const std::string> lines) {
  Segments seg;
  seg.placement.assign(lines.size(), Placement::tenor);

  SectionMarker cursor = SectionMarker::tenor;
  std::array<int, 5> seen{};
  std::vector<std::size_t> gruende_index;
  std::vector<std::string> gruende_lines;

  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (const auto marker = match_header(lines[i])) {
      cursor = *marker;
      seg.placement[i] = Placement::header;
      if (++seen[static_cast<std::size_t>(*marker)] == 2) seg.repeated_headers.push_back(*marker);
      continue;
    }
    if (cursor == SectionMarker::gruende) {
      gruende_index.push_back(i);
      gruende_lines.push_back(lines[i]);
    }
    seg.placement[i] = placement_for(cursor);
  }

  // All Gründe blocks of a decision are split as one sequence.
  const GruendeSplit split = split_gruende_placement(gruende_lines);
  for (std::size_t k = 0; k < gruende_index.size(); ++k) seg.placement[gruende_index[k]] = split.placement[k];

  for (std::size_t i = 0; i < lines.size(); ++i) {
    switch (seg.placement[i]) {
      case Placement::tenor: seg.tenor.push_back(lines[i]); break;
      case Placement::tatbestand: seg.tatbestand.push_back(lines[i]); break;
      case Placement::entscheidungsgruende: seg.entscheidungsgruende.push_back(lines[i]); break;
      case Placement::rechtsmittelbelehrung: seg.rechtsmittelbelehrung.push_back(lines[i]); break;
      case Placement::header:
      case Placement::roman_marker: break;
    }
  }
  return seg;
}

std::string join_lines(std::span<const std::string> lines) {
  std::string out;
  for (const auto& line : lines) {
    if (!out.empty()) out.push_back('\n');
    out += line;
  }
  return out;
}

}  // namespace olseg
