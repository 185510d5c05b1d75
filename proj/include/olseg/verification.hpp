#pragma once

// Statistical audit of segmentation quality: Cochran sample size with
// finite population correction, reproducible sampling, a persistent review
// session and the normal-approximation confidence interval (also with FPC).

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "olseg/corpus_model.hpp"

namespace olseg {

/// Invalid statistical parameters or sampling requests.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Two-sided critical value of the standard normal distribution. The
/// conventional table values are returned for 0.90, 0.95 and 0.99.
double critical_value(double confidence);

/// Standard normal quantile (inverse CDF), p in (0,1).
double normal_quantile(double p);

/// Infinite-population sample size Z^2 p (1-p) / e^2.
double cochran_n0(double z, double p, double e);

/// n0 / (1 + (n0 - 1) / N).
double fpc_sample_size(double n0, std::uint64_t population_n);

struct SamplingPlan {
  std::uint64_t population_n = 0;
  double confidence = 0.95;
  double margin_e = 0.05;
  double assumed_p = 0.5;
  double z = 0.0;
  double n0 = 0.0;
  double n_real = 0.0;
  std::uint64_t n = 0;  // ceil(n_real)

  bool operator==(const SamplingPlan&) const = default;
};

SamplingPlan plan(std::uint64_t population_n, double confidence = 0.95, double margin = 0.05,
                  double assumed_p = 0.5);

nlohmann::ordered_json to_json(const SamplingPlan& p);
SamplingPlan plan_from_json(const nlohmann::json& j);

/// Uniform sample without replacement: partial Fisher-Yates over `ids` in
/// the given order, driven by mt19937_64(seed). Output in draw order and
/// identical on every platform.
std::vector<DecisionId> draw_sample(std::span<const DecisionId> ids, std::uint64_t n, std::uint64_t seed);

/// Uniform integer in [0, bound) from a 64-bit engine, by rejection.
std::uint64_t uniform_below(std::uint64_t bound, std::function<std::uint64_t()> next);

struct Interval {
  double low = 0.0;
  double high = 0.0;
  double half_width = 0.0;  // before clipping
};

/// Normal-approximation interval for k/n with finite population
/// correction, clipped to [0,1].
Interval proportion_ci(std::uint64_t k_correct, std::uint64_t n, std::uint64_t population_n, double confidence);

enum class Verdict { correct, incorrect };

std::string_view to_string(Verdict v);
Verdict verdict_from_string(std::string_view s);

struct Judgment {
  Verdict verdict = Verdict::correct;
  std::string note;
  std::string timestamp;  // ISO-8601 UTC

  bool operator==(const Judgment&) const = default;
};

struct VerificationReport {
  std::uint64_t n = 0;
  std::uint64_t k_correct = 0;
  double p_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double half_width = 0.0;
  double confidence = 0.0;

  bool operator==(const VerificationReport&) const = default;
};

nlohmann::ordered_json to_json(const VerificationReport& r);
std::string format_text(const VerificationReport& r);

/// Report requested before every sampled case was judged.
class IncompleteReview : public std::runtime_error {
public:
  explicit IncompleteReview(std::vector<DecisionId> missing);
  const std::vector<DecisionId>& missing() const { return missing_; }

private:
  std::vector<DecisionId> missing_;
};

/// Aggregate judgments into a report; throws IncompleteReview when any
/// sampled id lacks a judgment.
VerificationReport make_report(const SamplingPlan& plan, std::span<const DecisionId> sampled_ids,
                               const std::map<DecisionId, Judgment>& judgments);

/// A review session persisted as a JSON snapshot plus an append-only
/// journal of judgments (`<file>.journal`). Every judgment is fsync'ed to
/// the journal before record_judgment() returns; the journal is folded into
/// the snapshot by compact(). Single writer.
class VerificationSession {
public:
  using Clock = std::function<std::string()>;

  /// New session; writes the snapshot and removes a stale journal.
  static VerificationSession create(const std::filesystem::path& file, const SamplingPlan& plan,
                                    std::uint64_t seed, std::vector<DecisionId> sampled_ids,
                                    std::optional<std::string> corpus = std::nullopt);

  /// Snapshot plus journal replay. A torn final journal line is ignored.
  static VerificationSession open(const std::filesystem::path& file);

  const SamplingPlan& plan() const { return plan_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<DecisionId>& sampled_ids() const { return sampled_ids_; }
  const std::map<DecisionId, Judgment>& judgments() const { return judgments_; }
  const std::optional<std::string>& corpus() const { return corpus_; }
  const std::filesystem::path& file() const { return file_; }
  bool contains(DecisionId id) const;

  /// Upsert. Throws DomainError for ids outside the sample and
  /// std::runtime_error when the journal cannot be written; in both cases
  /// the in-memory state is unchanged.
  void record_judgment(DecisionId id, Verdict verdict, std::string note);

  /// Rewrite the snapshot atomically and truncate the journal.
  void compact();

  /// Journal entries after which record_judgment() compacts (0 = never).
  void set_compact_threshold(std::size_t entries) { compact_threshold_ = entries; }
  void set_clock(Clock clock) { clock_ = std::move(clock); }

  VerificationReport report() const;

  nlohmann::ordered_json to_json() const;

private:
  VerificationSession() = default;
  std::filesystem::path journal_path() const;

  std::filesystem::path file_;
  SamplingPlan plan_;
  std::uint64_t seed_ = 0;
  std::vector<DecisionId> sampled_ids_;
  std::map<DecisionId, Judgment> judgments_;
  std::optional<std::string> corpus_;
  std::size_t journal_entries_ = 0;
  std::size_t compact_threshold_ = 256;
  Clock clock_;
};

/// Current UTC time as "YYYY-MM-DDTHH:MM:SSZ".
std::string utc_timestamp();

}  // namespace olseg
