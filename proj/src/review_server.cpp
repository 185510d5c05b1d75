#include "olseg/review_server.hpp"

#include <charconv>
#include <fstream>
#include <mutex>

#include <httplib.h>

namespace olseg {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

ApiResponse json_response(int status, const ordered_json& body) {
  return {status, body.dump(-1, ' ', false, json::error_handler_t::replace), "application/json"};
}

ApiResponse error_response(int status, const std::string& message) {
  return json_response(status, ordered_json{{"error", message}});
}

std::optional<DecisionId> parse_id(std::string_view s) {
  DecisionId id = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), id);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return id;
}

constexpr std::string_view kPlaceholderPage =
    "<!doctype html><html><head><meta charset=\"utf-8\"><title>olseg review</title></head>"
    "<body><h1>olseg review API</h1><p>No UI assets configured; start with --ui-dir to serve the "
    "review interface. API endpoints live under <code>/api/</code>.</p></body></html>";

}  // namespace

ReviewService::ReviewService(VerificationSession session, const std::filesystem::path& corpus)
    : session_(std::move(session)) {
  std::ifstream in(corpus, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read corpus " + corpus.string());
  SegmentedStreamReader reader(in);
  while (auto item = reader.next()) {
    if (auto* d = std::get_if<SegmentedDecision>(&*item); d != nullptr && session_.contains(d->id))
      cases_.emplace(d->id, std::move(*d));
  }
  std::size_t missing = 0;
  for (DecisionId id : session_.sampled_ids()) missing += cases_.contains(id) ? 0 : 1;
  if (missing > 0)
    throw std::runtime_error(corpus.string() + " lacks " + std::to_string(missing) + " sampled decisions");
}

ordered_json ReviewService::session_json() const {
  const auto& judgments = session_.judgments();
  ordered_json j;
  j["plan"] = to_json(session_.plan());
  j["seed"] = session_.seed();
  j["total"] = session_.sampled_ids().size();
  j["judged"] = judgments.size();
  j["sampled_ids"] = session_.sampled_ids();
  ordered_json verdicts = ordered_json::object();
  for (const auto& [id, jd] : judgments) verdicts[std::to_string(id)] = std::string(to_string(jd.verdict));
  j["judgments"] = std::move(verdicts);

  j["next_unjudged"] = nullptr;
  for (DecisionId id : session_.sampled_ids()) {
    if (!judgments.contains(id)) {
      j["next_unjudged"] = id;
      break;
    }
  }

  // Running estimate over the judged cases; the UI displays, never computes.
  if (judgments.empty()) {
    j["estimate"] = nullptr;
  } else {
    std::uint64_t k = 0;
    for (const auto& [id, jd] : judgments) k += jd.verdict == Verdict::correct ? 1 : 0;
    const std::uint64_t n = judgments.size();
    const auto& plan = session_.plan();
    const Interval ci = proportion_ci(k, n, std::max<std::uint64_t>(plan.population_n, n), plan.confidence);
    j["estimate"] = {{"n", n},
                     {"k_correct", k},
                     {"p_hat", static_cast<double>(k) / static_cast<double>(n)},
                     {"ci_low", ci.low},
                     {"ci_high", ci.high},
                     {"half_width", ci.half_width},
                     {"confidence", plan.confidence},
                     {"interim", n < kInterimThreshold}};
  }
  return j;
}

ApiResponse ReviewService::get_session() const {
  std::shared_lock lock(mutex_);
  return json_response(200, session_json());
}

ApiResponse ReviewService::get_case(DecisionId id) const {
  std::shared_lock lock(mutex_);
  auto it = cases_.find(id);
  if (it == cases_.end()) return error_response(404, "case " + std::to_string(id) + " is not part of the sample");
  const SegmentedDecision& d = it->second;
  ordered_json j;
  j["id"] = d.id;
  j["file_number"] = d.file_number;
  j["date"] = d.date ? ordered_json(*d.date) : ordered_json(nullptr);
  j["type"] = d.decision_type ? ordered_json(*d.decision_type) : ordered_json(nullptr);
  j["court"] = {{"name", d.court.name}, {"state", d.court.state}, {"city", d.court.city}};
  j["tenor"] = d.tenor;
  j["tatbestand"] = d.tatbestand;
  j["entscheidungsgruende"] = d.entscheidungsgruende;
  j["rechtsmittelbelehrung"] = d.rechtsmittelbelehrung;
  ordered_json refs = ordered_json::array();
  for (const auto& r : d.references) refs.push_back(to_json(r));
  j["references"] = std::move(refs);
  const auto& judgments = session_.judgments();
  if (auto jt = judgments.find(id); jt != judgments.end()) {
    j["verdict"] = std::string(to_string(jt->second.verdict));
    j["note"] = jt->second.note;
  } else {
    j["verdict"] = nullptr;
    j["note"] = nullptr;
  }
  return json_response(200, j);
}

ApiResponse ReviewService::post_judgment(DecisionId id, std::string_view body) {
  json request;
  try {
    request = json::parse(body);
  } catch (const json::exception& e) {
    return error_response(400, std::string("invalid JSON body: ") + e.what());
  }
  if (!request.is_object() || !request.contains("verdict") || !request["verdict"].is_string())
    return error_response(400, "body must be an object with a string 'verdict'");
  std::string note;
  if (request.contains("note") && !request["note"].is_null()) {
    if (!request["note"].is_string()) return error_response(400, "'note' must be a string");
    note = request["note"].get<std::string>();
  }

  std::unique_lock lock(mutex_);
  if (!session_.contains(id)) return error_response(404, "case " + std::to_string(id) + " is not part of the sample");
  try {
    session_.record_judgment(id, verdict_from_string(request["verdict"].get<std::string>()), std::move(note));
  } catch (const DomainError& e) {
    return error_response(400, e.what());
  } catch (const std::exception& e) {
    return error_response(500, std::string("could not persist judgment: ") + e.what());
  }
  const auto& jd = session_.judgments().at(id);
  return json_response(200, ordered_json{{"id", id},
                                         {"verdict", std::string(to_string(jd.verdict))},
                                         {"note", jd.note},
                                         {"judged", session_.judgments().size()},
                                         {"total", session_.sampled_ids().size()}});
}

ApiResponse ReviewService::get_report() const {
  std::shared_lock lock(mutex_);
  try {
    return json_response(200, to_json(session_.report()));
  } catch (const IncompleteReview& e) {
    return json_response(400, ordered_json{{"error", "incomplete review"}, {"missing", e.missing().size()}});
  }
}

void ReviewService::compact() {
  std::unique_lock lock(mutex_);
  session_.compact();
}

ApiResponse ReviewService::handle(std::string_view method, std::string_view path, std::string_view body) {
  constexpr std::string_view cases_prefix = "/api/cases/";
  constexpr std::string_view judgment_suffix = "/judgment";
  if (path == "/api/session") {
    if (method != "GET") return error_response(405, "method not allowed");
    return get_session();
  }
  if (path == "/api/report") {
    if (method != "GET") return error_response(405, "method not allowed");
    return get_report();
  }
  if (path.starts_with(cases_prefix)) {
    std::string_view rest = path.substr(cases_prefix.size());
    const bool judgment = rest.ends_with(judgment_suffix);
    if (judgment) rest.remove_suffix(judgment_suffix.size());
    const auto id = parse_id(rest);
    if (!id) return error_response(404, "not found");
    if (judgment) {
      if (method != "POST") return error_response(405, "method not allowed");
      return post_judgment(*id, body);
    }
    if (method != "GET") return error_response(405, "method not allowed");
    return get_case(*id);
  }
  return error_response(404, "not found");
}

ReviewServer::ReviewServer(ReviewService& service, ServeOptions options)
    : service_(service), options_(std::move(options)), server_(std::make_unique<httplib::Server>()) {
  auto dispatch = [this](const httplib::Request& req, httplib::Response& res) {
    const ApiResponse r = service_.handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };
  server_->Get(R"(/api/.*)", dispatch);
  server_->Post(R"(/api/.*)", dispatch);
  if (options_.ui_dir) {
    if (!server_->set_mount_point("/", options_.ui_dir->string()))
      throw std::runtime_error("UI directory not found: " + options_.ui_dir->string());
  } else {
    server_->Get("/", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(std::string(kPlaceholderPage), "text/html; charset=utf-8");
    });
  }
}

ReviewServer::~ReviewServer() { stop(); }

void ReviewServer::bind() {
  if (options_.port == 0) {
    port_ = server_->bind_to_any_port(options_.host);
  } else if (server_->bind_to_port(options_.host, options_.port)) {
    port_ = options_.port;
  } else {
    port_ = -1;
  }
  if (port_ <= 0)
    throw std::runtime_error("cannot bind " + options_.host + ":" + std::to_string(options_.port) +
                             " (port in use?)");
}

int ReviewServer::start() {
  bind();
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port_;
}

void ReviewServer::run() {
  bind();
  server_->listen_after_bind();
}

void ReviewServer::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace olseg
