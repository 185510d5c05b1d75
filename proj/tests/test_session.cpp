#include <doctest.h>

#include <csignal>
#include <numeric>
#include <sys/wait.h>
#include <unistd.h>

#include "olseg/verification.hpp"
#include "test_support.hpp"

using namespace olseg;

namespace {

std::vector<DecisionId> ids_1_to(DecisionId n) {
  std::vector<DecisionId> ids(static_cast<std::size_t>(n));
  std::iota(ids.begin(), ids.end(), 1);
  return ids;
}

VerificationSession fresh(const testing::TempDir& dir, DecisionId n = 384) {
  auto s = VerificationSession::create(dir / "session.json", plan(251038), 7, ids_1_to(n), std::string("corpus.jsonl"));
  s.set_clock([] { return std::string("2024-01-01T00:00:00Z"); });
  return s;
}

}  // namespace

TEST_CASE("create writes a readable snapshot") {
  testing::TempDir dir;
  const auto s = fresh(dir);
  const auto j = nlohmann::json::parse(testing::read_file(dir / "session.json"));
  CHECK(j["seed"] == 7);
  CHECK(j["sampled_ids"].size() == 384);
  CHECK(j["plan"]["n"] == 384);
  CHECK(j["corpus"] == "corpus.jsonl");
  CHECK(j["judgments"].empty());
  const auto reopened = VerificationSession::open(dir / "session.json");
  CHECK(reopened.plan() == s.plan());
  CHECK(reopened.sampled_ids() == s.sampled_ids());
  CHECK(reopened.corpus() == "corpus.jsonl");
  CHECK_THROWS_AS(VerificationSession::create(dir / "dup.json", plan(100), 1, {1, 2, 2}), DomainError);
}

TEST_CASE("judgments upsert and survive reopening") {
  testing::TempDir dir;
  auto s = fresh(dir);
  s.record_judgment(5, Verdict::correct, "fine");
  s.record_judgment(5, Verdict::incorrect, "Tatbestand split wrong");
  CHECK(s.judgments().size() == 1);
  CHECK(s.judgments().at(5).verdict == Verdict::incorrect);
  CHECK(s.judgments().at(5).timestamp == "2024-01-01T00:00:00Z");
  CHECK(std::filesystem::exists(dir / "session.json.journal"));

  const auto reopened = VerificationSession::open(dir / "session.json");
  CHECK(reopened.judgments() == s.judgments());

  CHECK_THROWS_AS(s.record_judgment(999, Verdict::correct, ""), DomainError);
  CHECK(s.judgments().size() == 1);
}

TEST_CASE("compaction folds the journal into the snapshot") {
  testing::TempDir dir;
  auto s = fresh(dir);
  s.set_compact_threshold(0);
  for (DecisionId id = 1; id <= 10; ++id) s.record_judgment(id, Verdict::correct, "");
  s.compact();
  CHECK_FALSE(std::filesystem::exists(dir / "session.json.journal"));
  const auto j = nlohmann::json::parse(testing::read_file(dir / "session.json"));
  CHECK(j["judgments"].size() == 10);
  CHECK(j["judgments"]["3"]["verdict"] == "correct");
  CHECK(VerificationSession::open(dir / "session.json").judgments() == s.judgments());
}

TEST_CASE("automatic compaction after the configured number of entries") {
  testing::TempDir dir;
  auto s = fresh(dir);
  s.set_compact_threshold(4);
  for (DecisionId id = 1; id <= 4; ++id) s.record_judgment(id, Verdict::correct, "");
  CHECK_FALSE(std::filesystem::exists(dir / "session.json.journal"));
  s.record_judgment(5, Verdict::correct, "");
  CHECK(std::filesystem::exists(dir / "session.json.journal"));
  CHECK(VerificationSession::open(dir / "session.json").judgments().size() == 5);
}

TEST_CASE("all judgments recorded before a hard kill are recovered") {
  testing::TempDir dir;
  { fresh(dir); }
  const pid_t child = ::fork();
  REQUIRE(child >= 0);
  if (child == 0) {
    auto s = VerificationSession::open(dir / "session.json");
    s.set_compact_threshold(0);
    for (DecisionId id = 1; id <= 100; ++id)
      s.record_judgment(id, id % 10 == 0 ? Verdict::incorrect : Verdict::correct, "n" + std::to_string(id));
    ::raise(SIGKILL);
    ::_exit(0);
  }
  int status = 0;
  ::waitpid(child, &status, 0);
  REQUIRE(WIFSIGNALED(status));
  const auto s = VerificationSession::open(dir / "session.json");
  REQUIRE(s.judgments().size() == 100);
  CHECK(s.judgments().at(10).verdict == Verdict::incorrect);
  CHECK(s.judgments().at(99).note == "n99");
}

TEST_CASE("a torn final journal line is dropped and the journal compacted") {
  testing::TempDir dir;
  {
    auto s = fresh(dir);
    s.set_compact_threshold(0);
    for (DecisionId id = 1; id <= 3; ++id) s.record_judgment(id, Verdict::correct, "");
  }
  {
    std::ofstream journal(dir / "session.json.journal", std::ios::app);
    journal << "{\"id\":4,\"verdict\":\"corr";
  }
  const auto s = VerificationSession::open(dir / "session.json");
  CHECK(s.judgments().size() == 3);
  CHECK_FALSE(std::filesystem::exists(dir / "session.json.journal"));
  CHECK(VerificationSession::open(dir / "session.json").judgments().size() == 3);
}

TEST_CASE("corruption before the final journal line is an error") {
  testing::TempDir dir;
  { fresh(dir); }
  testing::write_file(dir / "session.json.journal", "garbage\n{\"id\":1,\"verdict\":\"correct\"}\n");
  CHECK_THROWS_AS(VerificationSession::open(dir / "session.json"), std::runtime_error);
}

TEST_CASE("a journal write failure leaves the session unchanged") {
  testing::TempDir dir;
  auto s = fresh(dir);
  s.record_judgment(1, Verdict::correct, "");
  std::filesystem::remove(dir / "session.json.journal");
  std::filesystem::create_directory(dir / "session.json.journal");
  CHECK_THROWS_AS(s.record_judgment(2, Verdict::correct, ""), std::runtime_error);
  CHECK(s.judgments().size() == 1);
  CHECK_FALSE(s.judgments().contains(2));
}

TEST_CASE("report from a session") {
  testing::TempDir dir;
  auto s = fresh(dir);
  s.set_compact_threshold(64);
  for (DecisionId id = 1; id <= 192; ++id) s.record_judgment(id, Verdict::correct, "");
  try {
    (void)s.report();
    FAIL("expected IncompleteReview");
  } catch (const IncompleteReview& e) {
    CHECK(e.missing().size() == 192);
  }
  for (DecisionId id = 193; id <= 384; ++id)
    s.record_judgment(id, id > 374 ? Verdict::incorrect : Verdict::correct, "");
  const auto r = VerificationSession::open(dir / "session.json").report();
  CHECK(r.k_correct == 374);
  CHECK(std::abs(r.ci_low - 0.9581) <= 0.0005);
  CHECK(std::abs(r.ci_high - 0.9899) <= 0.0005);
}

TEST_CASE("opening bad session files fails clearly") {
  testing::TempDir dir;
  CHECK_THROWS_AS(VerificationSession::open(dir / "missing.json"), std::runtime_error);
  testing::write_file(dir / "bad.json", "{\"plan\": 1}");
  CHECK_THROWS_AS(VerificationSession::open(dir / "bad.json"), std::runtime_error);
  testing::write_file(dir / "broken.json", "{");
  CHECK_THROWS_AS(VerificationSession::open(dir / "broken.json"), std::runtime_error);
}
