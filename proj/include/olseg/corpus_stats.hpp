#pragma once

// Section coverage and structural composition of a segmented corpus.

#include <cstddef>
#include <string>

#include "olseg/corpus_model.hpp"

namespace olseg {

struct Share {
  std::size_t count = 0;
  double percent = 0.0;  // 100 * count / total, unrounded; 0 for an empty corpus

  bool operator==(const Share&) const = default;
};

/// Percent with one decimal, or two below 5% ("87.7", "3.32", "0.07").
std::string format_percent(double percent);

/// Percent rounded as format_percent() prints it.
double rounded_percent(double percent);

/// Raw counts; associative and commutative under merge().
struct CoverageCounts {
  std::size_t total = 0;
  std::size_t tenor = 0;
  std::size_t tatbestand = 0;
  std::size_t entscheidungsgruende = 0;
  std::size_t rechtsmittelbelehrung = 0;
  std::size_t all_three = 0;
  std::size_t tenor_and_eg_only = 0;
  std::size_t tenor_only = 0;
  std::size_t all_absent = 0;
  std::size_t other = 0;  // combinations not covered by the categories above

  void add(const SegmentedDecision& d);
  void merge(const CoverageCounts& other);

  bool operator==(const CoverageCounts&) const = default;
};

struct CoverageReport {
  std::size_t total = 0;
  Share tenor;
  Share tatbestand;
  Share entscheidungsgruende;
  Share rechtsmittelbelehrung;
  Share all_three;
  Share tenor_and_eg_only;
  Share tenor_only;
  Share all_absent;
  Share other;

  static CoverageReport from_counts(const CoverageCounts& counts);

  bool operator==(const CoverageReport&) const = default;
};

template <typename Range>
CoverageReport coverage(const Range& decisions) {
  CoverageCounts counts;
  for (const auto& d : decisions) counts.add(d);
  return CoverageReport::from_counts(counts);
}

/// Aligned plain-text table.
std::string format_text(const CoverageReport& report);

nlohmann::ordered_json to_json(const CoverageReport& report);

}  // namespace olseg
