#pragma once

// HTTP API backing the browser review UI.
//
//   GET  /api/session               plan, progress, interim estimate
//   GET  /api/cases/{id}            section texts + references + verdict
//   POST /api/cases/{id}/judgment   {"verdict": "correct"|"incorrect", "note": "..."}
//   GET  /api/report                final report; 400 with missing count while incomplete
//   GET  /                          static UI assets

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <thread>
#include <string>

#include "olseg/corpus_model.hpp"
#include "olseg/verification.hpp"

namespace httplib {
class Server;
}

namespace olseg {

/// Judgments below this count are flagged as interim estimates.
inline constexpr std::size_t kInterimThreshold = 30;

struct ApiResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

/// Transport-independent request handling. Reads run concurrently;
/// judgment writes are serialized.
class ReviewService {
public:
  /// Loads the sampled decisions from `corpus`; every sampled id must be
  /// present there.
  ReviewService(VerificationSession session, const std::filesystem::path& corpus);

  ApiResponse handle(std::string_view method, std::string_view path, std::string_view body = {});

  ApiResponse get_session() const;
  ApiResponse get_case(DecisionId id) const;
  ApiResponse post_judgment(DecisionId id, std::string_view body);
  ApiResponse get_report() const;

  /// Snapshot of the current session state.
  nlohmann::ordered_json session_json() const;

  /// Folds the journal into the session file.
  void compact();

private:
  mutable std::shared_mutex mutex_;
  VerificationSession session_;
  std::map<DecisionId, SegmentedDecision> cases_;
};

struct ServeOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0: pick a free port
  std::optional<std::filesystem::path> ui_dir;
};

/// Owns the HTTP server. start() binds and serves on a background thread.
class ReviewServer {
public:
  ReviewServer(ReviewService& service, ServeOptions options);
  ~ReviewServer();
  ReviewServer(const ReviewServer&) = delete;
  ReviewServer& operator=(const ReviewServer&) = delete;

  /// Returns the bound port. Throws std::runtime_error if binding fails.
  int start();
  /// Blocks in the calling thread until stop().
  void run();
  void stop();

private:
  void bind();

  ReviewService& service_;
  ServeOptions options_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
};

}  // namespace olseg
