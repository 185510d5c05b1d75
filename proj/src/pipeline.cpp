#include "olseg/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <thread>
#include <unordered_set>
#include <variant>

#include "olseg/html_extract.hpp"
#include "olseg/segmenter.hpp"

namespace olseg {

using nlohmann::ordered_json;

SegmentedDecision process_decision(const RawDecision& raw, const GeoDirectory& dir, const KnownCodes& codes,
                                   std::vector<std::string>* warnings) {
  ExtractResult extracted = extract_lines(raw.content);
  if (warnings != nullptr) {
    for (auto& w : extracted.warnings) warnings->push_back("id " + std::to_string(raw.id) + ": " + w);
  }
  std::vector<std::string> lines;
  lines.reserve(extracted.lines.size());
  for (auto& l : extracted.lines) lines.push_back(std::move(l.text));

  const Segments seg = segment(lines);

  SegmentedDecision out;
  out.id = raw.id;
  out.file_number = raw.file_number;
  out.date = raw.date;
  out.decision_type = raw.decision_type;
  out.ecli = raw.ecli;
  out.court = normalize_court(raw.court_raw, dir);
  out.tenor = join_lines(seg.tenor);
  out.tatbestand = join_lines(seg.tatbestand);
  out.entscheidungsgruende = join_lines(seg.entscheidungsgruende);
  out.rechtsmittelbelehrung = join_lines(seg.rechtsmittelbelehrung);
  out.references = extract_references(lines, codes);
  return out;
}

ordered_json to_json(const RunManifest& m) {
  ordered_json j;
  j["input"] = m.input;
  j["output"] = m.output;
  j["states"] = m.states ? ordered_json(*m.states) : ordered_json(nullptr);
  j["cities"] = m.cities ? ordered_json(*m.cities) : ordered_json(nullptr);
  j["jobs"] = m.jobs;
  j["counts"] = {{"read", m.counts.read},
                 {"segmented", m.counts.segmented},
                 {"skipped", m.counts.skipped},
                 {"errors", m.counts.errors},
                 {"warnings", m.counts.warnings}};
  j["started"] = m.started;
  j["finished"] = m.finished;
  j["tool_version"] = m.tool_version;
  if (m.fatal_error) j["fatal_error"] = *m.fatal_error;
  return j;
}

std::filesystem::path manifest_path(const std::filesystem::path& output) {
  return output.string() + ".manifest.json";
}

namespace {

void write_manifest(const RunManifest& m, const std::filesystem::path& output) {
  std::ofstream out(manifest_path(output), std::ios::binary | std::ios::trunc);
  out << to_json(m).dump(2) << '\n';
}

struct Slot {
  std::variant<RawDecision, RecordError> input;
  SegmentedDecision output;
  std::vector<std::string> warnings;
};

// Processes a batch with `jobs` workers; results stay in input order.
void process_batch(std::vector<Slot>& batch, unsigned jobs, const GeoDirectory& dir, const KnownCodes& codes) {
  auto work = [&](std::size_t i) {
    if (const auto* raw = std::get_if<RawDecision>(&batch[i].input))
      batch[i].output = process_decision(*raw, dir, codes, &batch[i].warnings);
  };
  if (jobs <= 1 || batch.size() <= 1) {
    for (std::size_t i = 0; i < batch.size(); ++i) work(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> workers;
  const unsigned n = std::min<std::size_t>(jobs, batch.size());
  workers.reserve(n);
  for (unsigned w = 0; w < n; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < batch.size(); i = next++) work(i);
    });
  }
}

}  // namespace

RunManifest run_segment(const SegmentOptions& options, const std::function<void(const RecordError&)>& on_error) {
  RunManifest manifest;
  manifest.input = options.input.string();
  manifest.output = options.output.string();
  if (options.states) manifest.states = options.states->string();
  if (options.cities) manifest.cities = options.cities->string();
  manifest.jobs = options.jobs != 0 ? options.jobs : std::max(1u, std::thread::hardware_concurrency());
  manifest.started = utc_timestamp();

  auto fail = [&](const std::string& message) {
    manifest.fatal_error = message;
    manifest.finished = utc_timestamp();
    write_manifest(manifest, options.output);
    throw std::runtime_error(message);
  };

  GeoDirectory dir;
  if (options.states || options.cities) {
    if (!options.states || !options.cities) fail("--states and --cities must be given together");
    try {
      dir = load_directory(*options.states, *options.cities);
    } catch (const std::exception& e) {
      fail(e.what());
    }
  }
  KnownCodes loaded_codes;
  const KnownCodes* codes = &KnownCodes::defaults();
  if (options.known_codes) {
    try {
      loaded_codes = KnownCodes::load(*options.known_codes);
      codes = &loaded_codes;
    } catch (const std::exception& e) {
      fail(e.what());
    }
  }

  std::ifstream in(options.input, std::ios::binary);
  if (!in) fail("cannot read input " + options.input.string());
  std::ofstream out(options.output, std::ios::binary | std::ios::trunc);
  if (!out) fail("cannot write output " + options.output.string());

  RawStreamReader reader(in);
  SegmentedStreamWriter writer(out);
  const std::size_t batch_size = std::max<std::size_t>(1, options.chunk_per_job) * manifest.jobs;
  std::vector<Slot> batch;
  batch.reserve(batch_size);

  auto flush = [&] {
    process_batch(batch, manifest.jobs, dir, *codes);
    for (auto& slot : batch) {
      manifest.counts.warnings += slot.warnings.size();
      if (const auto* err = std::get_if<RecordError>(&slot.input)) {
        ++manifest.counts.skipped;
        ++manifest.counts.errors;
        if (on_error) on_error(*err);
        continue;
      }
      try {
        writer.write(slot.output);
      } catch (const std::exception& e) {
        manifest.counts.segmented = writer.count();
        fail(std::string("output write failed: ") + e.what());
      }
    }
    manifest.counts.segmented = writer.count();
    batch.clear();
  };

  while (auto item = reader.next()) {
    ++manifest.counts.read;
    batch.push_back(Slot{std::move(*item), {}, {}});
    if (batch.size() >= batch_size) flush();
  }
  flush();
  out.flush();
  if (!out) fail("output flush failed");

  manifest.finished = utc_timestamp();
  write_manifest(manifest, options.output);
  return manifest;
}

CoverageReport stats_file(const std::filesystem::path& input, std::size_t* errors) {
  std::ifstream in(input, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + input.string());
  SegmentedStreamReader reader(in);
  CoverageCounts counts;
  std::size_t bad = 0;
  while (auto item = reader.next()) {
    if (const auto* d = std::get_if<SegmentedDecision>(&*item)) {
      counts.add(*d);
    } else {
      ++bad;
    }
  }
  if (errors != nullptr) *errors = bad;
  return CoverageReport::from_counts(counts);
}

VerificationSession create_session(const SampleOptions& options) {
  std::ifstream in(options.corpus, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read corpus " + options.corpus.string());
  SegmentedStreamReader reader(in);
  std::vector<DecisionId> ids;
  std::size_t bad = 0;
  while (auto item = reader.next()) {
    if (const auto* d = std::get_if<SegmentedDecision>(&*item)) {
      ids.push_back(d->id);
    } else {
      ++bad;
    }
  }
  if (bad > 0) throw std::runtime_error(options.corpus.string() + ": " + std::to_string(bad) + " malformed records");
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
    throw std::runtime_error(options.corpus.string() + ": duplicate decision ids");
  if (ids.empty()) throw DomainError("corpus is empty; nothing to sample");

  const std::uint64_t population = options.population.value_or(ids.size());
  const SamplingPlan p = plan(population, options.confidence, options.margin, options.assumed_p);
  std::vector<DecisionId> sample = draw_sample(ids, p.n, options.seed);
  return VerificationSession::create(options.session, p, options.seed, std::move(sample),
                                     options.corpus.string());
}

}  // namespace olseg
