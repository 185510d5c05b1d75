#pragma once

// End-to-end processing: raw dump -> segmented JSONL (+ run manifest),
// corpus statistics, and review-session creation.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "olseg/corpus_model.hpp"
#include "olseg/corpus_stats.hpp"
#include "olseg/metadata_normalize.hpp"
#include "olseg/reference_extract.hpp"
#include "olseg/verification.hpp"

namespace olseg {

inline constexpr std::string_view kToolVersion = "0.1.0";

/// extract_lines -> segment -> extract_references -> normalize_court.
/// HTML warnings are appended to `warnings` when given.
SegmentedDecision process_decision(const RawDecision& raw, const GeoDirectory& dir, const KnownCodes& codes,
                                   std::vector<std::string>* warnings = nullptr);

struct RunCounts {
  std::size_t read = 0;        // non-blank input lines
  std::size_t segmented = 0;   // records written
  std::size_t skipped = 0;     // lines that produced no record
  std::size_t errors = 0;      // per-record errors logged
  std::size_t warnings = 0;    // non-fatal extraction warnings
};

struct RunManifest {
  std::string input;
  std::string output;
  std::optional<std::string> states;
  std::optional<std::string> cities;
  unsigned jobs = 1;
  RunCounts counts;
  std::string started;
  std::string finished;
  std::string tool_version{kToolVersion};
  std::optional<std::string> fatal_error;
};

nlohmann::ordered_json to_json(const RunManifest& m);

struct SegmentOptions {
  std::filesystem::path input;
  std::filesystem::path output;
  std::optional<std::filesystem::path> states;
  std::optional<std::filesystem::path> cities;
  std::optional<std::filesystem::path> known_codes;
  unsigned jobs = 0;               // 0: hardware concurrency
  std::size_t chunk_per_job = 256; // records handed to each worker per round
};

/// Manifest lands next to the output as "<output>.manifest.json".
std::filesystem::path manifest_path(const std::filesystem::path& output);

/// Runs the segmentation. Per-record errors are counted and reported
/// through `on_error`; fatal errors (unreadable input, bad snapshot) throw
/// after the manifest has been written.
RunManifest run_segment(const SegmentOptions& options,
                        const std::function<void(const RecordError&)>& on_error = {});

/// Coverage over a segmented JSONL file. Throws when unreadable.
CoverageReport stats_file(const std::filesystem::path& input, std::size_t* errors = nullptr);

struct SampleOptions {
  std::filesystem::path corpus;   // segmented JSONL
  std::filesystem::path session;  // session file to create
  double confidence = 0.95;
  double margin = 0.05;
  double assumed_p = 0.5;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> population;  // defaults to the corpus size
};

/// Plans on the corpus size, samples from its ids sorted ascending and
/// writes a fresh session file.
VerificationSession create_session(const SampleOptions& options);

}  // namespace olseg
