#include <doctest.h>

#include <cstdio>
#include <thread>

#include <httplib.h>

#include "olseg/pipeline.hpp"
#include "olseg/review_server.hpp"
#include "test_support.hpp"

using namespace olseg;
using nlohmann::json;

namespace {

std::filesystem::path golden() { return testing::data_dir() / "mini_corpus.golden.jsonl"; }

VerificationSession mini_session(const testing::TempDir& dir) {
  SampleOptions o;
  o.corpus = golden();
  o.session = dir / "session.json";
  o.seed = 7;
  return create_session(o);
}

json body(const ApiResponse& r) { return json::parse(r.body); }

std::string run_cli(const std::string& args) {
  const std::string cmd = std::string(OLSEG_CLI_PATH) + " " + args + " 2>/dev/null";
  std::string out;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  ::pclose(pipe);
  return out;
}

}  // namespace

TEST_CASE("session endpoint reports progress and a running estimate") {
  testing::TempDir dir;
  ReviewService service(mini_session(dir), golden());
  auto r = service.handle("GET", "/api/session");
  CHECK(r.status == 200);
  auto j = body(r);
  CHECK(j["total"] == 45);
  CHECK(j["judged"] == 0);
  CHECK(j["estimate"].is_null());
  const auto first = j["next_unjudged"].get<DecisionId>();
  CHECK(first == j["sampled_ids"][0].get<DecisionId>());

  r = service.handle("POST", "/api/cases/" + std::to_string(first) + "/judgment", R"({"verdict":"correct"})");
  CHECK(r.status == 200);
  j = body(service.handle("GET", "/api/session"));
  CHECK(j["judged"] == 1);
  CHECK(j["judgments"][std::to_string(first)] == "correct");
  CHECK(j["estimate"]["interim"] == true);
  CHECK(j["estimate"]["p_hat"] == 1.0);
  CHECK(j["next_unjudged"] == j["sampled_ids"][1]);
}

TEST_CASE("case endpoint returns sections, references and verdict") {
  testing::TempDir dir;
  auto session = mini_session(dir);
  const DecisionId id = session.sampled_ids()[0];
  ReviewService service(std::move(session), golden());
  auto j = body(service.handle("GET", "/api/cases/" + std::to_string(id)));
  CHECK(j["id"] == id);
  for (const char* key : {"file_number", "court", "tenor", "tatbestand", "entscheidungsgruende",
                          "rechtsmittelbelehrung", "references"})
    CHECK(j.contains(key));
  CHECK(j["verdict"].is_null());

  service.handle("POST", "/api/cases/" + std::to_string(id) + "/judgment",
                 R"({"verdict":"incorrect","note":"Gründe nicht geteilt"})");
  j = body(service.handle("GET", "/api/cases/" + std::to_string(id)));
  CHECK(j["verdict"] == "incorrect");
  CHECK(j["note"] == "Gründe nicht geteilt");
}

TEST_CASE("request errors") {
  testing::TempDir dir;
  auto session = mini_session(dir);
  const std::string id = std::to_string(session.sampled_ids()[0]);
  ReviewService service(std::move(session), golden());
  CHECK(service.handle("GET", "/api/cases/1").status == 404);
  CHECK(service.handle("GET", "/api/cases/abc").status == 404);
  CHECK(service.handle("GET", "/api/nothing").status == 404);
  CHECK(service.handle("DELETE", "/api/session").status == 405);
  CHECK(service.handle("GET", "/api/cases/" + id + "/judgment").status == 405);
  CHECK(service.handle("POST", "/api/cases/" + id + "/judgment", "not json").status == 400);
  CHECK(service.handle("POST", "/api/cases/" + id + "/judgment", R"({"verdict":"maybe"})").status == 400);
  CHECK(service.handle("POST", "/api/cases/" + id + "/judgment", R"({"verdict":"correct","note":5})").status == 400);
  CHECK(service.handle("POST", "/api/cases/" + id + "/judgment", R"(["correct"])").status == 400);
  CHECK(service.handle("POST", "/api/cases/1/judgment", R"({"verdict":"correct"})").status == 404);
  CHECK(body(service.handle("GET", "/api/session"))["judged"] == 0);
}

TEST_CASE("report endpoint refuses incomplete reviews") {
  testing::TempDir dir;
  ReviewService service(mini_session(dir), golden());
  const auto r = service.handle("GET", "/api/report");
  CHECK(r.status == 400);
  CHECK(body(r)["missing"] == 45);
}

TEST_CASE("a persistence failure is reported as a server error") {
  testing::TempDir dir;
  auto session = mini_session(dir);
  const std::string id = std::to_string(session.sampled_ids()[0]);
  ReviewService service(std::move(session), golden());
  std::filesystem::create_directory(dir / "session.json.journal");
  CHECK(service.handle("POST", "/api/cases/" + id + "/judgment", R"({"verdict":"correct"})").status == 500);
  CHECK(body(service.handle("GET", "/api/session"))["judged"] == 0);
}

TEST_CASE("a corpus lacking sampled cases is rejected") {
  testing::TempDir dir;
  auto session = mini_session(dir);
  testing::write_file(dir / "partial.jsonl", "");
  CHECK_THROWS_AS(ReviewService(std::move(session), dir / "partial.jsonl"), std::runtime_error);
}

TEST_CASE("review over HTTP matches the CLI report") {
  testing::TempDir dir;
  const auto session_ids = mini_session(dir).sampled_ids();
  ReviewService service(VerificationSession::open(dir / "session.json"), golden());
  ServeOptions opts;
  opts.port = 0;
  ReviewServer server(service, opts);
  const int port = server.start();
  REQUIRE(port > 0);

  httplib::Client client("127.0.0.1", port);
  auto res = client.Get("/");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(res->body.find("review") != std::string::npos);

  // Concurrent reviewers: judgments from several threads all land.
  std::vector<std::thread> reviewers;
  for (int t = 0; t < 3; ++t) {
    reviewers.emplace_back([&, t] {
      httplib::Client c("127.0.0.1", port);
      for (std::size_t i = t; i < session_ids.size(); i += 3) {
        const std::string verdict = i % 9 == 4 ? "incorrect" : "correct";
        auto r = c.Post("/api/cases/" + std::to_string(session_ids[i]) + "/judgment",
                        json{{"verdict", verdict}}.dump(), "application/json");
        CHECK((r && r->status == 200));
        CHECK(c.Get("/api/session"));
      }
    });
  }
  for (auto& t : reviewers) t.join();

  res = client.Get("/api/report");
  REQUIRE(res);
  REQUIRE(res->status == 200);
  const auto api = json::parse(res->body);
  server.stop();
  service.compact();

  CHECK(api["n"] == 45);
  CHECK(api["k_correct"] == 40);
  const auto cli = json::parse(run_cli("verify report --json --session " + (dir / "session.json").string()));
  CHECK(cli == api);
}

TEST_CASE("static UI directory is served when configured") {
  testing::TempDir dir;
  ReviewService service(mini_session(dir), golden());
  std::filesystem::create_directory(dir / "ui");
  testing::write_file(dir / "ui" / "index.html", "<html>ui build</html>");
  ServeOptions opts;
  opts.port = 0;
  opts.ui_dir = dir / "ui";
  ReviewServer server(service, opts);
  const int port = server.start();
  httplib::Client client("127.0.0.1", port);
  auto res = client.Get("/index.html");
  REQUIRE(res);
  CHECK(res->body == "<html>ui build</html>");
  res = client.Get("/api/session");
  REQUIRE(res);
  CHECK(res->status == 200);

  opts.ui_dir = dir / "absent";
  CHECK_THROWS_AS(ReviewServer(service, opts), std::runtime_error);
}
