#pragma once

// Court metadata normalization against an offline snapshot of the
// state/city directory (optionally refreshed from the live API).

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "olseg/corpus_model.hpp"

namespace olseg {

inline constexpr std::string_view kUnspecified = "Unspecified";

/// Environment variable holding the API base URL for fetch_directory.
inline constexpr const char* kApiBaseUrlEnv = "OLSEG_API_BASE_URL";
inline constexpr std::string_view kDefaultApiBaseUrl = "https://de.openlegaldata.io";

struct CityEntry {
  std::string name;
  std::optional<std::int64_t> state_id;
};

class GeoDirectory {
public:
  GeoDirectory() = default;

  /// Builds from already parsed entries; later duplicates replace earlier
  /// ones and add a warning.
  static GeoDirectory from_json(const nlohmann::json& states, const nlohmann::json& cities);

  const std::string* state_name(std::int64_t id) const;
  const CityEntry* city(std::int64_t id) const;

  std::size_t state_count() const { return states_.size(); }
  std::size_t city_count() const { return cities_.size(); }
  const std::vector<std::string>& warnings() const { return warnings_; }

  nlohmann::ordered_json states_json() const;
  nlohmann::ordered_json cities_json() const;

private:
  std::map<std::int64_t, std::string> states_;
  std::map<std::int64_t, CityEntry> cities_;
  std::vector<std::string> warnings_;
};

/// Thrown for unreadable snapshot files and failed API fetches.
class DirectoryError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Load snapshot files (JSON arrays of {id, name[, state]}).
GeoDirectory load_directory(const std::filesystem::path& states_file, const std::filesystem::path& cities_file);

struct FetchOptions {
  std::string base_url;  // e.g. "https://de.openlegaldata.io"
  std::filesystem::path states_out;
  std::filesystem::path cities_out;
  int timeout_seconds = 30;
};

/// Pages through /api/states/ and /api/cities/ and writes both snapshot
/// files. Nothing is written if any request fails.
GeoDirectory fetch_directory(const FetchOptions& options);

/// Base URL from, in order: the explicit value, the environment, the default.
std::string resolve_api_base_url(const std::optional<std::string>& flag);

Court normalize_court(const RawCourt& court, const GeoDirectory& dir);

}  // namespace olseg
