#pragma once

// Record types shared by the whole pipeline and the streaming JSONL
// readers/writers for them.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

namespace olseg {

using DecisionId = std::int64_t;

struct RawCourt {
  std::int64_t court_id = 0;
  std::string name;
  std::optional<std::int64_t> state_id;
  std::optional<std::int64_t> city_id;

  bool operator==(const RawCourt&) const = default;
};

/// One record of the input dump.
struct RawDecision {
  DecisionId id = 0;
  std::string file_number;
  std::optional<std::string> date;  // YYYY-MM-DD
  std::optional<std::string> decision_type;
  std::optional<std::string> ecli;
  RawCourt court_raw;
  std::string content;  // HTML, may be empty

  bool operator==(const RawDecision&) const = default;
};

enum class RefType { law, case_ };

std::string_view to_string(RefType t);

struct ParsedReference {
  std::optional<std::string> code;
  std::optional<std::string> section;
  std::optional<std::string> docket;
  // false when the statute code token is not on the known-codes list
  bool known_code = true;

  bool operator==(const ParsedReference&) const = default;
};

struct LegalReference {
  RefType ref_type = RefType::law;
  std::string raw_text;
  std::optional<ParsedReference> parsed;

  bool operator==(const LegalReference&) const = default;
};

struct Court {
  std::string name;
  std::string state;
  std::string city;

  bool operator==(const Court&) const = default;
};

/// Output record: normalized metadata, the four section texts, references.
struct SegmentedDecision {
  DecisionId id = 0;
  std::string file_number;
  std::optional<std::string> date;
  std::optional<std::string> decision_type;
  std::optional<std::string> ecli;
  Court court;
  std::string tenor;
  std::string tatbestand;
  std::string entscheidungsgruende;
  std::string rechtsmittelbelehrung;
  std::vector<LegalReference> references;

  bool operator==(const SegmentedDecision&) const = default;
};

// JSON mapping. Output objects use a fixed key order.
nlohmann::ordered_json to_json(const LegalReference& ref);
nlohmann::ordered_json to_json(const SegmentedDecision& d);
LegalReference legal_reference_from_json(const nlohmann::json& j);
SegmentedDecision segmented_from_json(const nlohmann::json& j);
RawDecision raw_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const RawDecision& d);

/// Serialize one record as a single JSONL line (no trailing newline).
std::string to_jsonl_line(const SegmentedDecision& d);

struct RecordError {
  std::size_t line_number = 0;  // 1-based
  std::string message;
};

/// Sequential JSONL reader with a skip-and-report policy: malformed lines
/// produce a RecordError and reading continues with the next line.
/// Blank lines are skipped silently.
template <typename Record>
class JsonlReader {
public:
  using Item = std::variant<Record, RecordError>;

  explicit JsonlReader(std::istream& in) : in_(&in) {}

  /// Next record or error; nullopt at end of stream.
  std::optional<Item> next();

  std::size_t line_number() const { return line_number_; }

private:
  std::istream* in_;
  std::size_t line_number_ = 0;
  std::string buffer_;
};

using RawStreamReader = JsonlReader<RawDecision>;
using SegmentedStreamReader = JsonlReader<SegmentedDecision>;

extern template class JsonlReader<RawDecision>;
extern template class JsonlReader<SegmentedDecision>;

/// Writes one record per line. Throws std::ios_base::failure on I/O error;
/// count() then holds the number of records fully written before it.
class SegmentedStreamWriter {
public:
  explicit SegmentedStreamWriter(std::ostream& out) : out_(&out) {}

  void write(const SegmentedDecision& d);
  std::size_t count() const { return count_; }

private:
  std::ostream* out_;
  std::size_t count_ = 0;
};

/// Write every record of a range; returns the number written.
template <typename Range>
std::size_t write_segmented_stream(const Range& records, std::ostream& out) {
  SegmentedStreamWriter writer(out);
  for (const auto& r : records) writer.write(r);
  return writer.count();
}

/// Convenience: drain a reader into records and errors.
template <typename Record>
struct ReadAll {
  std::vector<Record> records;
  std::vector<RecordError> errors;
};

ReadAll<RawDecision> read_all_raw(std::istream& in);
ReadAll<SegmentedDecision> read_all_segmented(std::istream& in);

}  // namespace olseg
