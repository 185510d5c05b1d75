#include "olseg/metadata_normalize.hpp"

#include <cstdlib>
#include <fstream>

#include <httplib.h>

namespace olseg {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::optional<std::int64_t> state_ref(const json& city) {
  for (const char* key : {"state", "state_id"}) {
    auto it = city.find(key);
    if (it == city.end() || it->is_null()) continue;
    if (it->is_number_integer()) return it->get<std::int64_t>();
    if (it->is_object() && it->contains("id") && (*it)["id"].is_number_integer())
      return (*it)["id"].get<std::int64_t>();
  }
  return std::nullopt;
}

std::int64_t entry_id(const json& entry, const char* what) {
  if (!entry.is_object() || !entry.contains("id") || !entry["id"].is_number_integer())
    throw std::invalid_argument(std::string(what) + " entry without integer id");
  return entry["id"].get<std::int64_t>();
}

std::string entry_name(const json& entry, const char* what) {
  if (!entry.contains("name") || !entry["name"].is_string())
    throw std::invalid_argument(std::string(what) + " entry without name");
  return entry["name"].get<std::string>();
}

json read_array(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DirectoryError("cannot read " + path.string());
  try {
    json j = json::parse(in);
    if (!j.is_array()) throw DirectoryError(path.string() + ": expected a JSON array");
    return j;
  } catch (const json::exception& e) {
    throw DirectoryError(path.string() + ": " + e.what());
  }
}

std::filesystem::path write_tmp(const std::filesystem::path& path, const std::string& body) {
  auto tmp = std::filesystem::path(path.string() + ".tmp");
  std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
  out << body;
  if (!out) throw DirectoryError("cannot write " + tmp.string());
  return tmp;
}

struct BaseUrl {
  std::string scheme_host_port;
  std::string prefix;
};

BaseUrl split_base_url(const std::string& url) {
  const std::size_t scheme = url.find("://");
  const std::size_t host_start = scheme == std::string::npos ? 0 : scheme + 3;
  const std::size_t slash = url.find('/', host_start);
  BaseUrl out;
  out.scheme_host_port = url.substr(0, slash);
  if (slash != std::string::npos) out.prefix = url.substr(slash);
  while (!out.prefix.empty() && out.prefix.back() == '/') out.prefix.pop_back();
  return out;
}

json fetch_all_pages(httplib::Client& client, const std::string& path) {
  json all = json::array();
  for (int page = 1;; ++page) {
    const std::string target = path + "?page=" + std::to_string(page);
    auto res = client.Get(target, httplib::Headers{{"Accept", "application/json"}});
    if (!res) {
      throw DirectoryError("GET " + path + " page " + std::to_string(page) + " failed: " +
                           httplib::to_string(res.error()));
    }
    if (res->status != 200) {
      throw DirectoryError("GET " + path + " page " + std::to_string(page) + " returned HTTP " +
                           std::to_string(res->status));
    }
    json body;
    try {
      body = json::parse(res->body);
    } catch (const json::exception& e) {
      throw DirectoryError("GET " + path + " page " + std::to_string(page) + ": invalid JSON: " + e.what());
    }
    // Unpaginated endpoints answer with a bare array.
    if (body.is_array()) {
      for (auto& e : body) all.push_back(std::move(e));
      return all;
    }
    if (!body.is_object() || !body.contains("results") || !body["results"].is_array()) {
      throw DirectoryError("GET " + path + " page " + std::to_string(page) + ": unexpected response shape");
    }
    if (body["results"].empty()) return all;
    for (auto& e : body["results"]) all.push_back(std::move(e));
    if (!body.contains("next") || body["next"].is_null()) return all;
  }
}

}  // namespace

GeoDirectory GeoDirectory::from_json(const json& states, const json& cities) {
  GeoDirectory dir;
  for (const auto& s : states) {
    const auto id = entry_id(s, "state");
    auto [it, inserted] = dir.states_.insert_or_assign(id, entry_name(s, "state"));
    if (!inserted) dir.warnings_.push_back("duplicate state id " + std::to_string(id) + ": last entry wins");
  }
  for (const auto& c : cities) {
    const auto id = entry_id(c, "city");
    CityEntry entry{entry_name(c, "city"), state_ref(c)};
    if (entry.state_id && !dir.states_.contains(*entry.state_id)) {
      dir.warnings_.push_back("city " + std::to_string(id) + " references unknown state " +
                              std::to_string(*entry.state_id));
      entry.state_id.reset();
    }
    auto [it, inserted] = dir.cities_.insert_or_assign(id, std::move(entry));
    if (!inserted) dir.warnings_.push_back("duplicate city id " + std::to_string(id) + ": last entry wins");
  }
  return dir;
}

const std::string* GeoDirectory::state_name(std::int64_t id) const {
  auto it = states_.find(id);
  return it == states_.end() ? nullptr : &it->second;
}

const CityEntry* GeoDirectory::city(std::int64_t id) const {
  auto it = cities_.find(id);
  return it == cities_.end() ? nullptr : &it->second;
}

ordered_json GeoDirectory::states_json() const {
  ordered_json out = ordered_json::array();
  for (const auto& [id, name] : states_) out.push_back({{"id", id}, {"name", name}});
  return out;
}

ordered_json GeoDirectory::cities_json() const {
  ordered_json out = ordered_json::array();
  for (const auto& [id, c] : cities_) {
    ordered_json e = {{"id", id}, {"name", c.name}};
    e["state"] = c.state_id ? ordered_json(*c.state_id) : ordered_json(nullptr);
    out.push_back(std::move(e));
  }
  return out;
}

GeoDirectory load_directory(const std::filesystem::path& states_file, const std::filesystem::path& cities_file) {
  const json states = read_array(states_file);
  const json cities = read_array(cities_file);
  try {
    return GeoDirectory::from_json(states, cities);
  } catch (const std::invalid_argument& e) {
    throw DirectoryError(states_file.string() + " / " + cities_file.string() + ": " + e.what());
  }
}

GeoDirectory fetch_directory(const FetchOptions& options) {
  const BaseUrl base = split_base_url(options.base_url);
  httplib::Client client(base.scheme_host_port);
  client.set_connection_timeout(options.timeout_seconds, 0);
  client.set_read_timeout(options.timeout_seconds, 0);
  client.set_follow_location(true);

  const json states = fetch_all_pages(client, base.prefix + "/api/states/");
  const json cities = fetch_all_pages(client, base.prefix + "/api/cities/");
  GeoDirectory dir;
  try {
    dir = GeoDirectory::from_json(states, cities);
  } catch (const std::invalid_argument& e) {
    throw DirectoryError(std::string("API returned malformed entries: ") + e.what());
  }
  // Both snapshots are staged before either replaces an existing file.
  const auto states_tmp = write_tmp(options.states_out, dir.states_json().dump(2) + "\n");
  const auto cities_tmp = write_tmp(options.cities_out, dir.cities_json().dump(2) + "\n");
  std::filesystem::rename(states_tmp, options.states_out);
  std::filesystem::rename(cities_tmp, options.cities_out);
  return dir;
}

std::string resolve_api_base_url(const std::optional<std::string>& flag) {
  if (flag && !flag->empty()) return *flag;
  if (const char* env = std::getenv(kApiBaseUrlEnv); env != nullptr && *env != '\0') return env;
  return std::string(kDefaultApiBaseUrl);
}

Court normalize_court(const RawCourt& court, const GeoDirectory& dir) {
  Court out;
  out.name = court.name.empty() ? std::string(kUnspecified) : court.name;

  const CityEntry* city = court.city_id ? dir.city(*court.city_id) : nullptr;
  out.city = city != nullptr && !city->name.empty() ? city->name : std::string(kUnspecified);

  const std::string* state = court.state_id ? dir.state_name(*court.state_id) : nullptr;
  if (state == nullptr && city != nullptr && city->state_id) state = dir.state_name(*city->state_id);
  out.state = state != nullptr && !state->empty() ? *state : std::string(kUnspecified);
  return out;
}

}  // namespace olseg
