#pragma once

// Statute and case citation extraction.
//
// Statute citations: "§", "§§", "Art." or "Artikel", one or more section
// numbers with optional qualifiers (Abs., Satz, Nr., lit., ...) and
// enumerations, then an optional code token ("BGB", "SGB V", ...).
// "§§ 242, 826 BGB" expands into one reference per section.
//
// Case citations: court dockets ("VIII ZR 21/19", "1 BvR 1234/20",
// "L 9 AS 123/17") and ECLI identifiers.

#include <cstddef>
#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "olseg/corpus_model.hpp"

namespace olseg {

class KnownCodes {
public:
  KnownCodes() = default;
  explicit KnownCodes(std::set<std::string, std::less<>> codes) : codes_(std::move(codes)) {}

  /// Embedded default list.
  static const KnownCodes& defaults();

  /// One code per line; blank lines and '#' comments ignored.
  /// Throws std::runtime_error naming the file when unreadable.
  static KnownCodes load(const std::filesystem::path& path);

  /// True for listed codes and for "SGB <roman>" style books of a listed code.
  bool contains(std::string_view code) const;
  void add(std::string code) { codes_.insert(std::move(code)); }
  std::size_t size() const { return codes_.size(); }

private:
  std::set<std::string, std::less<>> codes_;
};

/// One citation found in one line, with its byte span in that line.
struct ReferenceMatch {
  LegalReference reference;
  std::size_t begin = 0;
  std::size_t end = 0;
};

/// All citations in a single line, overlaps resolved to the longest match,
/// ordered by position. Enumerations yield several matches sharing a span.
std::vector<ReferenceMatch> find_references(std::string_view line, const KnownCodes& codes = KnownCodes::defaults());

struct ExtractedReferences {
  std::vector<LegalReference> references;  // distinct, in order of first occurrence
  std::vector<std::size_t> occurrences;    // parallel to references
};

ExtractedReferences extract_references_counted(std::span<const std::string> lines,
                                               const KnownCodes& codes = KnownCodes::defaults());

std::vector<LegalReference> extract_references(std::span<const std::string> lines,
                                               const KnownCodes& codes = KnownCodes::defaults());

}  // namespace olseg
