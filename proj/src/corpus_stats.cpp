#include "olseg/corpus_stats.hpp"

#include <cmath>
#include <cstdio>
#include <utility>
#include <vector>

namespace olseg {

namespace {

int decimals_for(double percent) { return percent < 5.0 ? 2 : 1; }

Share share(std::size_t count, std::size_t total) {
  return {count, total == 0 ? 0.0 : 100.0 * static_cast<double>(count) / static_cast<double>(total)};
}

std::string with_thousands(std::size_t n) {
  std::string digits = std::to_string(n);
  std::string out;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i > 0 && (digits.size() - i) % 3 == 0) out.push_back(',');
    out.push_back(digits[i]);
  }
  return out;
}

}  // namespace

std::string format_percent(double percent) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", decimals_for(percent), percent);
  return buf;
}

double rounded_percent(double percent) {
  const double scale = decimals_for(percent) == 2 ? 100.0 : 10.0;
  return std::round(percent * scale) / scale;
}

void CoverageCounts::add(const SegmentedDecision& d) {
  const bool t = !d.tenor.empty();
  const bool f = !d.tatbestand.empty();
  const bool r = !d.entscheidungsgruende.empty();
  const bool rmb = !d.rechtsmittelbelehrung.empty();
  ++total;
  tenor += t;
  tatbestand += f;
  entscheidungsgruende += r;
  rechtsmittelbelehrung += rmb;
  if (t && f && r) {
    ++all_three;
  } else if (t && r && !f) {
    ++tenor_and_eg_only;
  } else if (t && !f && !r) {
    ++tenor_only;
  } else if (!t && !f && !r && !rmb) {
    ++all_absent;
  } else {
    ++other;
  }
}

void CoverageCounts::merge(const CoverageCounts& o) {
  total += o.total;
  tenor += o.tenor;
  tatbestand += o.tatbestand;
  entscheidungsgruende += o.entscheidungsgruende;
  rechtsmittelbelehrung += o.rechtsmittelbelehrung;
  all_three += o.all_three;
  tenor_and_eg_only += o.tenor_and_eg_only;
  tenor_only += o.tenor_only;
  all_absent += o.all_absent;
  other += o.other;
}

CoverageReport CoverageReport::from_counts(const CoverageCounts& c) {
  CoverageReport r;
  r.total = c.total;
  r.tenor = share(c.tenor, c.total);
  r.tatbestand = share(c.tatbestand, c.total);
  r.entscheidungsgruende = share(c.entscheidungsgruende, c.total);
  r.rechtsmittelbelehrung = share(c.rechtsmittelbelehrung, c.total);
  r.all_three = share(c.all_three, c.total);
  r.tenor_and_eg_only = share(c.tenor_and_eg_only, c.total);
  r.tenor_only = share(c.tenor_only, c.total);
  r.all_absent = share(c.all_absent, c.total);
  r.other = share(c.other, c.total);
  return r;
}

std::string format_text(const CoverageReport& report) {
  const std::vector<std::pair<const char*, const Share*>> coverage_rows{
      {"Tenor", &report.tenor},
      {"Tatbestand", &report.tatbestand},
      {"Entscheidungsgruende", &report.entscheidungsgruende},
      {"Rechtsmittelbelehrung", &report.rechtsmittelbelehrung},
  };
  const std::vector<std::pair<const char*, const Share*>> structure_rows{
      {"All three sections", &report.all_three},
      {"Only Tenor + Ent.", &report.tenor_and_eg_only},
      {"Only Tenor", &report.tenor_only},
      {"All sections absent", &report.all_absent},
      {"Other combinations", &report.other},
  };
  std::string out;
  char line[128];
  std::snprintf(line, sizeof line, "Section coverage over %s decisions\n", with_thousands(report.total).c_str());
  out += line;
  auto rows = [&](const auto& table) {
    for (const auto& [label, s] : table) {
      std::snprintf(line, sizeof line, "  %-24s %12s (%s%%)\n", label, with_thousands(s->count).c_str(),
                    format_percent(s->percent).c_str());
      out += line;
    }
  };
  rows(coverage_rows);
  out += "Structural composition\n";
  rows(structure_rows);
  return out;
}

nlohmann::ordered_json to_json(const CoverageReport& report) {
  auto entry = [](const Share& s) {
    return nlohmann::ordered_json{{"count", s.count}, {"percent", rounded_percent(s.percent)}};
  };
  nlohmann::ordered_json j;
  j["total"] = report.total;
  j["sections"] = {{"tenor", entry(report.tenor)},
                   {"tatbestand", entry(report.tatbestand)},
                   {"entscheidungsgruende", entry(report.entscheidungsgruende)}};
  j["rechtsmittelbelehrung"] = entry(report.rechtsmittelbelehrung);
  j["structure"] = {{"all_three", entry(report.all_three)},
                    {"tenor_and_eg_only", entry(report.tenor_and_eg_only)},
                    {"tenor_only", entry(report.tenor_only)},
                    {"all_absent", entry(report.all_absent)},
                    {"other", entry(report.other)}};
  return j;
}

}  // namespace olseg
