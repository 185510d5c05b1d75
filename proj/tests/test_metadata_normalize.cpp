#include <doctest.h>

#include <cstdlib>

#include <httplib.h>

#include "olseg/metadata_normalize.hpp"
#include "test_support.hpp"

using namespace olseg;
using nlohmann::json;

namespace {

GeoDirectory fixture_directory() {
  return load_directory(testing::data_dir() / "states.json", testing::data_dir() / "cities.json");
}

RawCourt court(std::string name, std::optional<std::int64_t> state, std::optional<std::int64_t> city) {
  return {1, std::move(name), state, city};
}

// Serves paginated state/city listings on a free local port.
class MockApi {
public:
  MockApi() {
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~MockApi() {
    server_.stop();
    thread_.join();
  }
  httplib::Server& server() { return server_; }
  std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_); }

private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

json page(json results, bool has_next) {
  return {{"count", 0}, {"next", has_next ? json("next") : json(nullptr)}, {"results", std::move(results)}};
}

}  // namespace

TEST_CASE("snapshot fixtures load") {
  const auto dir = fixture_directory();
  CHECK(dir.state_count() == 5);
  CHECK(dir.city_count() == 7);
  CHECK(dir.warnings().empty());
  REQUIRE(dir.state_name(10) != nullptr);
  CHECK(*dir.state_name(10) == "Nordrhein-Westfalen");
  REQUIRE(dir.city(105) != nullptr);
  CHECK_FALSE(dir.city(105)->state_id);
}

TEST_CASE("normalize_court fallback chain") {
  const auto dir = fixture_directory();
  CHECK(normalize_court(court("AG Köln", 10, 100), dir) == Court{"AG Köln", "Nordrhein-Westfalen", "Köln"});
  // State inferred from the city.
  CHECK(normalize_court(court("BGH", std::nullopt, 101), dir) == Court{"BGH", "Baden-Württemberg", "Karlsruhe"});
  // Unknown state id falls back to the city's state.
  CHECK(normalize_court(court("X", 77, 102), dir) == Court{"X", "Bayern", "München"});
  // City without state.
  CHECK(normalize_court(court("BSG", std::nullopt, 105), dir) == Court{"BSG", "Unspecified", "Kassel"});
  CHECK(normalize_court(court("", std::nullopt, std::nullopt), dir) ==
        Court{"Unspecified", "Unspecified", "Unspecified"});
  CHECK(normalize_court(court("VG", 12, 999), dir) == Court{"VG", "Hessen", "Unspecified"});
  CHECK(normalize_court(court("AG", 1, 1), GeoDirectory{}) == Court{"AG", "Unspecified", "Unspecified"});
}

TEST_CASE("duplicate ids and dangling state references warn") {
  const auto dir = GeoDirectory::from_json(
      json::parse(R"([{"id":1,"name":"Alt"},{"id":1,"name":"Neu"}])"),
      json::parse(R"([{"id":5,"name":"A","state":1},{"id":6,"name":"B","state":{"id":9}},{"id":5,"name":"C"}])"));
  CHECK(*dir.state_name(1) == "Neu");
  CHECK(dir.city(5)->name == "C");
  CHECK_FALSE(dir.city(6)->state_id);
  CHECK(dir.warnings().size() == 3);
}

TEST_CASE("malformed snapshots raise DirectoryError naming the file") {
  testing::TempDir tmp;
  testing::write_file(tmp / "states.json", "{\"not\": \"array\"}");
  testing::write_file(tmp / "cities.json", "[]");
  try {
    load_directory(tmp / "states.json", tmp / "cities.json");
    FAIL("expected DirectoryError");
  } catch (const DirectoryError& e) {
    CHECK(std::string(e.what()).find("states.json") != std::string::npos);
  }
  CHECK_THROWS_AS(load_directory(tmp / "missing.json", tmp / "cities.json"), DirectoryError);
  testing::write_file(tmp / "states.json", "[{\"name\": \"no id\"}]");
  CHECK_THROWS_AS(load_directory(tmp / "states.json", tmp / "cities.json"), DirectoryError);
  testing::write_file(tmp / "states.json", "[1, 2");
  CHECK_THROWS_AS(load_directory(tmp / "states.json", tmp / "cities.json"), DirectoryError);
}

TEST_CASE("API base URL resolution order") {
  ::unsetenv(kApiBaseUrlEnv);
  CHECK(resolve_api_base_url(std::nullopt) == kDefaultApiBaseUrl);
  ::setenv(kApiBaseUrlEnv, "http://env.example", 1);
  CHECK(resolve_api_base_url(std::nullopt) == "http://env.example");
  CHECK(resolve_api_base_url(std::string("http://flag.example")) == "http://flag.example");
  ::unsetenv(kApiBaseUrlEnv);
}

TEST_CASE("fetch_directory pages through both endpoints") {
  MockApi api;
  api.server().Get("/api/states/", [](const httplib::Request& req, httplib::Response& res) {
    const auto p = req.get_param_value("page");
    if (p == "1") {
      res.set_content(page(json::parse(R"([{"id":1,"name":"Bayern"},{"id":2,"name":"Berlin"}])"), true).dump(),
                      "application/json");
    } else if (p == "2") {
      res.set_content(page(json::parse(R"([{"id":3,"name":"Hessen"},{"id":4,"name":"Saarland"}])"), false).dump(),
                      "application/json");
    } else {
      res.status = 404;
    }
  });
  api.server().Get("/api/cities/", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"([{"id":10,"name":"München","state":1}])", "application/json");
  });

  testing::TempDir tmp;
  FetchOptions opts{api.base_url(), tmp / "states.json", tmp / "cities.json", 5};
  const auto dir = fetch_directory(opts);
  CHECK(dir.state_count() == 4);
  CHECK(dir.city_count() == 1);
  const auto reloaded = load_directory(opts.states_out, opts.cities_out);
  CHECK(*reloaded.state_name(4) == "Saarland");
  CHECK(reloaded.city(10)->state_id == 1);
}

TEST_CASE("fetch_directory stops at an empty page") {
  MockApi api;
  api.server().Get("/api/states/", [](const httplib::Request& req, httplib::Response& res) {
    const bool first = req.get_param_value("page") == "1";
    // The server claims more pages but the second is empty.
    res.set_content(page(first ? json::parse(R"([{"id":1,"name":"A"}])") : json::array(), true).dump(),
                    "application/json");
  });
  api.server().Get("/api/cities/", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(page(json::array(), true).dump(), "application/json");
  });
  testing::TempDir tmp;
  const auto dir = fetch_directory({api.base_url(), tmp / "s.json", tmp / "c.json", 5});
  CHECK(dir.state_count() == 1);
  CHECK(dir.city_count() == 0);
}

TEST_CASE("a failing endpoint writes no snapshot") {
  MockApi api;
  api.server().Get("/api/states/", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(page(json::parse(R"([{"id":1,"name":"A"}])"), false).dump(), "application/json");
  });
  api.server().Get("/api/cities/", [](const httplib::Request&, httplib::Response& res) { res.status = 500; });
  testing::TempDir tmp;
  testing::write_file(tmp / "s.json", "old");
  try {
    fetch_directory({api.base_url(), tmp / "s.json", tmp / "c.json", 5});
    FAIL("expected DirectoryError");
  } catch (const DirectoryError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("/api/cities/") != std::string::npos);
    CHECK(msg.find("500") != std::string::npos);
  }
  CHECK(testing::read_file(tmp / "s.json") == "old");
  CHECK_FALSE(std::filesystem::exists(tmp / "c.json"));
}

TEST_CASE("an unreachable API raises DirectoryError") {
  testing::TempDir tmp;
  int port = 0;
  {
    httplib::Server probe;
    port = probe.bind_to_any_port("127.0.0.1");
  }
  CHECK_THROWS_AS(fetch_directory({"http://127.0.0.1:" + std::to_string(port), tmp / "s.json", tmp / "c.json", 2}),
                  DirectoryError);
  CHECK_FALSE(std::filesystem::exists(tmp / "s.json"));
}
