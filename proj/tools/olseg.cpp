// olseg: segment court-decision dumps, report coverage, audit quality.

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "olseg/pipeline.hpp"
#include "olseg/review_server.hpp"

namespace {

enum ExitCode { kOk = 0, kFatal = 1, kUsage = 2, kIncomplete = 3 };

olseg::ReviewServer* g_server = nullptr;

void handle_signal(int) {
  if (g_server != nullptr) g_server->stop();
}

void print_plan(const olseg::SamplingPlan& p, bool json) {
  if (json) {
    std::cout << olseg::to_json(p).dump(2) << '\n';
    return;
  }
  std::printf("Population N:         %llu\n", static_cast<unsigned long long>(p.population_n));
  std::printf("Confidence:           %g (Z = %g)\n", p.confidence, p.z);
  std::printf("Margin of error e:    %g\n", p.margin_e);
  std::printf("Assumed proportion p: %g\n", p.assumed_p);
  std::printf("n0 (infinite pop.):   %.2f\n", p.n0);
  std::printf("n (with FPC):         %.2f\n", p.n_real);
  std::printf("n=%llu\n", static_cast<unsigned long long>(p.n));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Segmentation, statistics and verification for German court-decision corpora"};
  app.set_version_flag("--version", std::string(olseg::kToolVersion));
  app.require_subcommand(1);

  // segment
  auto* segment = app.add_subcommand("segment", "Segment a raw JSONL dump");
  olseg::SegmentOptions seg_opts;
  std::string states, cities, codes;
  segment->add_option("--input", seg_opts.input, "Raw dump (JSONL)")->required();
  segment->add_option("--output", seg_opts.output, "Segmented output (JSONL)")->required();
  segment->add_option("--states", states, "States snapshot (JSON array)");
  segment->add_option("--cities", cities, "Cities snapshot (JSON array)");
  segment->add_option("--codes", codes, "Known statute codes, one per line");
  segment->add_option("--jobs", seg_opts.jobs, "Worker threads (default: all cores)")->envname("OLSEG_JOBS");

  // stats
  auto* stats = app.add_subcommand("stats", "Section coverage of a segmented corpus");
  std::string stats_input;
  bool stats_json = false;
  stats->add_option("--input", stats_input, "Segmented corpus (JSONL)")->required();
  stats->add_flag("--json", stats_json, "Emit JSON");

  // verify
  auto* verify = app.add_subcommand("verify", "Sample-based verification of segmentation quality");
  verify->require_subcommand(1);
  double confidence = 0.95, margin = 0.05, assumed_p = 0.5;
  std::optional<std::uint64_t> population;
  std::uint64_t seed = 0;
  std::string session_file, corpus_file, host = "127.0.0.1", ui_dir;
  int port = 8080;
  bool verify_json = false;
  auto add_plan_flags = [&](CLI::App* cmd) {
    cmd->add_option("--confidence", confidence, "Confidence level")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--margin", margin, "Margin of error")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--assumed-p", assumed_p, "Assumed proportion")->check(CLI::Range(0.0, 1.0));
  };

  auto* vplan = verify->add_subcommand("plan", "Cochran sample size with finite population correction");
  vplan->add_option("--population", population, "Population size N")->required();
  add_plan_flags(vplan);
  vplan->add_flag("--json", verify_json, "Emit JSON");

  auto* vsample = verify->add_subcommand("sample", "Draw a sample and create a review session");
  vsample->add_option("--corpus", corpus_file, "Segmented corpus (JSONL)")->required();
  vsample->add_option("--session", session_file, "Session file to create")->required();
  vsample->add_option("--seed", seed, "Sampling seed");
  vsample->add_option("--population", population, "Population size (default: corpus size)");
  add_plan_flags(vsample);

  auto* vserve = verify->add_subcommand("serve", "Serve the review API");
  vserve->add_option("--session", session_file, "Session file")->required();
  vserve->add_option("--corpus", corpus_file, "Segmented corpus (default: the one recorded in the session)");
  vserve->add_option("--port", port, "Port")->envname("OLSEG_PORT");
  vserve->add_option("--host", host, "Bind address");
  vserve->add_option("--ui-dir", ui_dir, "Directory with the built review UI");

  auto* vreport = verify->add_subcommand("report", "Report the estimate and confidence interval");
  vreport->add_option("--session", session_file, "Session file")->required();
  vreport->add_flag("--json", verify_json, "Emit JSON");

  // fetch-geo
  auto* fetch = app.add_subcommand("fetch-geo", "Refresh state/city snapshots from the API");
  std::optional<std::string> base_url;
  olseg::FetchOptions fetch_opts;
  fetch->add_option("--base-url", base_url, std::string("API base URL (env ") + olseg::kApiBaseUrlEnv + ")");
  fetch->add_option("--states-out", fetch_opts.states_out, "States snapshot to write")->required();
  fetch->add_option("--cities-out", fetch_opts.cities_out, "Cities snapshot to write")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (segment->parsed()) {
      if (!states.empty()) seg_opts.states = states;
      if (!cities.empty()) seg_opts.cities = cities;
      if (!codes.empty()) seg_opts.known_codes = codes;
      const auto manifest = olseg::run_segment(seg_opts, [](const olseg::RecordError& e) {
        spdlog::warn("line {}: {}", e.line_number, e.message);
      });
      spdlog::info("read {}, segmented {}, skipped {}", manifest.counts.read, manifest.counts.segmented,
                   manifest.counts.skipped);
      return kOk;
    }

    if (stats->parsed()) {
      std::size_t errors = 0;
      const auto report = olseg::stats_file(stats_input, &errors);
      if (errors > 0) spdlog::warn("{} malformed records skipped", errors);
      if (stats_json) {
        std::cout << olseg::to_json(report).dump(2) << '\n';
      } else {
        std::cout << olseg::format_text(report);
      }
      return kOk;
    }

    if (fetch->parsed()) {
      fetch_opts.base_url = olseg::resolve_api_base_url(base_url);
      const auto dir = olseg::fetch_directory(fetch_opts);
      spdlog::info("fetched {} states, {} cities from {}", dir.state_count(), dir.city_count(), fetch_opts.base_url);
      return kOk;
    }

    if (vplan->parsed()) {
      print_plan(olseg::plan(*population, confidence, margin, assumed_p), verify_json);
      return kOk;
    }

    if (vsample->parsed()) {
      olseg::SampleOptions opts;
      opts.corpus = corpus_file;
      opts.session = session_file;
      opts.confidence = confidence;
      opts.margin = margin;
      opts.assumed_p = assumed_p;
      opts.seed = seed;
      opts.population = population;
      const auto session = olseg::create_session(opts);
      spdlog::info("sampled {} of {} decisions into {}", session.sampled_ids().size(),
                   session.plan().population_n, session_file);
      return kOk;
    }

    if (vserve->parsed()) {
      auto session = olseg::VerificationSession::open(session_file);
      std::string corpus = corpus_file;
      if (corpus.empty()) {
        if (!session.corpus()) {
          spdlog::error("session does not record a corpus; pass --corpus");
          return kUsage;
        }
        corpus = *session.corpus();
      }
      olseg::ReviewService service(std::move(session), corpus);
      olseg::ServeOptions opts;
      opts.host = host;
      opts.port = port;
      if (!ui_dir.empty()) opts.ui_dir = ui_dir;
      olseg::ReviewServer server(service, opts);
      g_server = &server;
      std::signal(SIGINT, handle_signal);
      std::signal(SIGTERM, handle_signal);
      spdlog::info("review API on http://{}:{}/", host, port);
      server.run();
      g_server = nullptr;
      service.compact();
      return kOk;
    }

    if (vreport->parsed()) {
      const auto session = olseg::VerificationSession::open(session_file);
      try {
        const auto report = session.report();
        if (verify_json) {
          std::cout << olseg::to_json(report).dump(2) << '\n';
        } else {
          std::cout << olseg::format_text(report);
        }
      } catch (const olseg::IncompleteReview& e) {
        spdlog::error("{}", e.what());
        return kIncomplete;
      }
      return kOk;
    }
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kFatal;
  }
  return kUsage;
}
