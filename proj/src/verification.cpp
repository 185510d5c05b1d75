#include "olseg/verification.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <system_error>

namespace olseg {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

bool near(double a, double b) { return std::fabs(a - b) < 1e-12; }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("normal_quantile: p must be in (0,1)");

  // Rational approximation (Acklam), relative error ~1e-9, then one Halley
  // step against erfc for full double precision.
  static constexpr std::array<double, 6> a{-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                           1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr std::array<double, 5> b{-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                           6.680131188771972e+01, -1.328068155288572e+01};
  static constexpr std::array<double, 6> c{-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                           -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00};
  static constexpr std::array<double, 4> d{7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                           3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double e = normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
  return x - u / (1.0 + x * u / 2.0);
}

double critical_value(double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0)) throw DomainError("confidence must be in (0,1)");
  if (near(confidence, 0.90)) return 1.645;
  if (near(confidence, 0.95)) return 1.96;
  if (near(confidence, 0.99)) return 2.576;
  return normal_quantile(1.0 - (1.0 - confidence) / 2.0);
}

double cochran_n0(double z, double p, double e) {
  if (!(z > 0.0)) throw DomainError("critical value must be positive");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("assumed proportion must be in [0,1]");
  if (!(e > 0.0 && e < 1.0)) throw DomainError("margin of error must be in (0,1)");
  return z * z * p * (1.0 - p) / (e * e);
}

double fpc_sample_size(double n0, std::uint64_t population_n) {
  if (population_n == 0) throw DomainError("population size must be at least 1");
  if (!(n0 >= 0.0)) throw DomainError("n0 must be non-negative");
  return n0 / (1.0 + (n0 - 1.0) / static_cast<double>(population_n));
}

SamplingPlan plan(std::uint64_t population_n, double confidence, double margin, double assumed_p) {
  SamplingPlan out;
  out.population_n = population_n;
  out.confidence = confidence;
  out.margin_e = margin;
  out.assumed_p = assumed_p;
  out.z = critical_value(confidence);
  out.n0 = cochran_n0(out.z, assumed_p, margin);
  out.n_real = fpc_sample_size(out.n0, population_n);
  // The epsilon absorbs rounding noise when n_real is integral.
  out.n = static_cast<std::uint64_t>(std::ceil(out.n_real - 1e-9));
  if (out.n > population_n) throw DomainError("sample size exceeds population");
  return out;
}

ordered_json to_json(const SamplingPlan& p) {
  return ordered_json{{"population_n", p.population_n}, {"confidence", p.confidence}, {"margin_e", p.margin_e},
                      {"assumed_p", p.assumed_p},       {"z", p.z},                   {"n0", p.n0},
                      {"n_real", p.n_real},             {"n", p.n}};
}

SamplingPlan plan_from_json(const json& j) {
  SamplingPlan p;
  p.population_n = j.at("population_n").get<std::uint64_t>();
  p.confidence = j.at("confidence").get<double>();
  p.margin_e = j.at("margin_e").get<double>();
  p.assumed_p = j.at("assumed_p").get<double>();
  p.z = j.at("z").get<double>();
  p.n0 = j.at("n0").get<double>();
  p.n_real = j.at("n_real").get<double>();
  p.n = j.at("n").get<std::uint64_t>();
  return p;
}

std::uint64_t uniform_below(std::uint64_t bound, std::function<std::uint64_t()> next) {
  if (bound == 0) throw DomainError("uniform_below: empty range");
  // Largest multiple of bound representable; values at or above it are
  // rejected so every residue is equally likely.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              (std::numeric_limits<std::uint64_t>::max() % bound + 1) % bound;
  while (true) {
    const std::uint64_t r = next();
    if (r <= limit) return r % bound;
  }
}

std::vector<DecisionId> draw_sample(std::span<const DecisionId> ids, std::uint64_t n, std::uint64_t seed) {
  if (n > ids.size()) throw DomainError("sample size " + std::to_string(n) + " exceeds " +
                                        std::to_string(ids.size()) + " available ids");
  std::vector<DecisionId> pool(ids.begin(), ids.end());
  std::mt19937_64 engine(seed);
  auto next = [&engine] { return engine(); };
  for (std::uint64_t i = 0; i < n; ++i) {
    const std::uint64_t j = i + uniform_below(pool.size() - i, next);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(n);
  return pool;
}

Interval proportion_ci(std::uint64_t k_correct, std::uint64_t n, std::uint64_t population_n, double confidence) {
  if (n == 0) throw DomainError("proportion_ci: sample size is zero");
  if (k_correct > n) throw DomainError("proportion_ci: k exceeds n");
  if (n > population_n) throw DomainError("proportion_ci: n exceeds population");
  const double z = critical_value(confidence);
  const double p_hat = static_cast<double>(k_correct) / static_cast<double>(n);
  const double fpc = population_n > 1 ? std::sqrt(static_cast<double>(population_n - n) /
                                                  static_cast<double>(population_n - 1))
                                      : 0.0;
  const double half = z * std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(n)) * fpc;
  return {std::clamp(p_hat - half, 0.0, 1.0), std::clamp(p_hat + half, 0.0, 1.0), half};
}

std::string_view to_string(Verdict v) { return v == Verdict::correct ? "correct" : "incorrect"; }

Verdict verdict_from_string(std::string_view s) {
  if (s == "correct") return Verdict::correct;
  if (s == "incorrect") return Verdict::incorrect;
  throw DomainError("verdict must be 'correct' or 'incorrect', got '" + std::string(s) + "'");
}

ordered_json to_json(const VerificationReport& r) {
  return ordered_json{{"n", r.n},           {"k_correct", r.k_correct},   {"p_hat", r.p_hat},
                      {"ci_low", r.ci_low}, {"ci_high", r.ci_high},       {"half_width", r.half_width},
                      {"confidence", r.confidence}};
}

std::string format_text(const VerificationReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "Reviewed:   %llu\n"
                "Correct:    %llu\n"
                "Estimate:   %.2f%% (+/- %.2f%%)\n"
                "%g%% CI:     (%.4f, %.4f)\n",
                static_cast<unsigned long long>(r.n), static_cast<unsigned long long>(r.k_correct), 100.0 * r.p_hat,
                100.0 * r.half_width, 100.0 * r.confidence, r.ci_low, r.ci_high);
  return buf;
}

IncompleteReview::IncompleteReview(std::vector<DecisionId> missing)
    : std::runtime_error("incomplete review: " + std::to_string(missing.size()) + " sampled cases without a judgment"),
      missing_(std::move(missing)) {}

VerificationReport make_report(const SamplingPlan& plan, std::span<const DecisionId> sampled_ids,
                               const std::map<DecisionId, Judgment>& judgments) {
  std::vector<DecisionId> missing;
  std::uint64_t k = 0;
  for (DecisionId id : sampled_ids) {
    auto it = judgments.find(id);
    if (it == judgments.end()) {
      missing.push_back(id);
    } else if (it->second.verdict == Verdict::correct) {
      ++k;
    }
  }
  if (!missing.empty()) throw IncompleteReview(std::move(missing));

  VerificationReport r;
  r.n = sampled_ids.size();
  r.k_correct = k;
  r.confidence = plan.confidence;
  r.p_hat = static_cast<double>(k) / static_cast<double>(r.n);
  const Interval ci = proportion_ci(k, r.n, plan.population_n, plan.confidence);
  r.ci_low = ci.low;
  r.ci_high = ci.high;
  r.half_width = ci.half_width;
  return r;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace {

[[noreturn]] void throw_errno(const std::string& what) {
  throw std::system_error(errno, std::generic_category(), what);
}

void write_all(int fd, const std::string& data, const std::string& path) {
  std::size_t off = 0;
  while (off < data.size()) {
    const ssize_t w = ::write(fd, data.data() + off, data.size() - off);
    if (w < 0) {
      if (errno == EINTR) continue;
      throw_errno("write " + path);
    }
    off += static_cast<std::size_t>(w);
  }
}

void durable_append(const std::filesystem::path& path, const std::string& data) {
  const int fd = ::open(path.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
  if (fd < 0) throw_errno("open " + path.string());
  try {
    write_all(fd, data, path.string());
    if (::fsync(fd) != 0) throw_errno("fsync " + path.string());
  } catch (...) {
    ::close(fd);
    throw;
  }
  ::close(fd);
}

void durable_replace(const std::filesystem::path& path, const std::string& data) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_TRUNC | O_CREAT | O_CLOEXEC, 0644);
  if (fd < 0) throw_errno("open " + tmp.string());
  try {
    write_all(fd, data, tmp.string());
    if (::fsync(fd) != 0) throw_errno("fsync " + tmp.string());
  } catch (...) {
    ::close(fd);
    throw;
  }
  ::close(fd);
  std::filesystem::rename(tmp, path);
  const auto dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  const int dfd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY | O_CLOEXEC);
  if (dfd >= 0) {
    ::fsync(dfd);
    ::close(dfd);
  }
}

ordered_json judgment_json(DecisionId id, const Judgment& j) {
  return ordered_json{
      {"id", id}, {"verdict", std::string(to_string(j.verdict))}, {"note", j.note}, {"timestamp", j.timestamp}};
}

Judgment judgment_from_json(const json& j) {
  Judgment out;
  out.verdict = verdict_from_string(j.at("verdict").get<std::string>());
  out.note = j.value("note", "");
  out.timestamp = j.value("timestamp", "");
  return out;
}

}  // namespace

std::filesystem::path VerificationSession::journal_path() const { return file_.string() + ".journal"; }

bool VerificationSession::contains(DecisionId id) const {
  return std::find(sampled_ids_.begin(), sampled_ids_.end(), id) != sampled_ids_.end();
}

ordered_json VerificationSession::to_json() const {
  ordered_json j;
  j["plan"] = olseg::to_json(plan_);
  j["seed"] = seed_;
  if (corpus_) j["corpus"] = *corpus_;
  j["sampled_ids"] = sampled_ids_;
  ordered_json judged = ordered_json::object();
  for (const auto& [id, judgment] : judgments_) {
    ordered_json e = judgment_json(id, judgment);
    e.erase("id");
    judged[std::to_string(id)] = std::move(e);
  }
  j["judgments"] = std::move(judged);
  return j;
}

VerificationSession VerificationSession::create(const std::filesystem::path& file, const SamplingPlan& plan,
                                                std::uint64_t seed, std::vector<DecisionId> sampled_ids,
                                                std::optional<std::string> corpus) {
  std::vector<DecisionId> sorted = sampled_ids;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw DomainError("sampled ids are not distinct");

  VerificationSession s;
  s.file_ = file;
  s.plan_ = plan;
  s.seed_ = seed;
  s.sampled_ids_ = std::move(sampled_ids);
  s.corpus_ = std::move(corpus);
  s.clock_ = utc_timestamp;
  std::filesystem::remove(s.journal_path());
  durable_replace(file, s.to_json().dump(2) + "\n");
  return s;
}

VerificationSession VerificationSession::open(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open session file " + file.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw std::runtime_error("session file " + file.string() + ": " + e.what());
  }

  VerificationSession s;
  s.file_ = file;
  s.clock_ = utc_timestamp;
  try {
    s.plan_ = plan_from_json(j.at("plan"));
    s.seed_ = j.at("seed").get<std::uint64_t>();
    s.sampled_ids_ = j.at("sampled_ids").get<std::vector<DecisionId>>();
    if (j.contains("corpus") && j["corpus"].is_string()) s.corpus_ = j["corpus"].get<std::string>();
    for (const auto& [key, value] : j.at("judgments").items()) {
      const DecisionId id = std::stoll(key);
      if (!s.contains(id)) throw DomainError("judgment for id " + key + " outside the sample");
      s.judgments_[id] = judgment_from_json(value);
    }
  } catch (const json::exception& e) {
    throw std::runtime_error("session file " + file.string() + ": " + e.what());
  }

  // Replay the journal.
  std::ifstream journal(s.journal_path(), std::ios::binary);
  if (journal) {
    std::stringstream buf;
    buf << journal.rdbuf();
    const std::string data = buf.str();
    std::size_t start = 0;
    bool torn = false;
    while (start < data.size()) {
      const std::size_t nl = data.find('\n', start);
      const bool last = nl == std::string::npos;
      const std::string line = data.substr(start, last ? std::string::npos : nl - start);
      start = last ? data.size() : nl + 1;
      if (line.empty()) continue;
      try {
        const json e = json::parse(line);
        const auto id = e.at("id").get<DecisionId>();
        if (!s.contains(id)) throw DomainError("journal judgment for id " + std::to_string(id) + " outside the sample");
        s.judgments_[id] = judgment_from_json(e);
        ++s.journal_entries_;
      } catch (const json::exception&) {
        if (!last) throw std::runtime_error("corrupt journal line in " + s.journal_path().string());
        torn = true;  // interrupted append
      }
    }
    if (torn) s.compact();
  }
  return s;
}

void VerificationSession::record_judgment(DecisionId id, Verdict verdict, std::string note) {
  if (!contains(id)) throw DomainError("id " + std::to_string(id) + " is not part of the sample");
  Judgment j{verdict, std::move(note), clock_ ? clock_() : utc_timestamp()};
  durable_append(journal_path(), judgment_json(id, j).dump() + "\n");
  judgments_[id] = std::move(j);
  ++journal_entries_;
  if (compact_threshold_ > 0 && journal_entries_ >= compact_threshold_) {
    try {
      compact();
    } catch (const std::exception&) {
      // The journal still holds every judgment; compaction is retried later.
    }
  }
}

void VerificationSession::compact() {
  durable_replace(file_, to_json().dump(2) + "\n");
  std::filesystem::remove(journal_path());
  journal_entries_ = 0;
}

VerificationReport VerificationSession::report() const { return make_report(plan_, sampled_ids_, judgments_); }

}  // namespace olseg
