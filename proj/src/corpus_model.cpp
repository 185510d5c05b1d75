#include "olseg/corpus_model.hpp"

#include <istream>
#include <ostream>
#include <stdexcept>

namespace olseg {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(RefType t) {
  return t == RefType::law ? "law" : "case";
}

namespace {

std::optional<std::string> opt_string(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string())
    throw std::invalid_argument(std::string("field '") + key + "' is not a string");
  return it->get<std::string>();
}

std::optional<std::int64_t> opt_id(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (it->is_number_integer()) return it->get<std::int64_t>();
  // The dump occasionally embeds the referenced object instead of its id.
  if (it->is_object()) {
    auto id = it->find("id");
    if (id != it->end() && id->is_number_integer()) return id->get<std::int64_t>();
    return std::nullopt;
  }
  throw std::invalid_argument(std::string("field '") + key + "' is not an integer id");
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Accepts YYYY-MM-DD optionally followed by a time part, which is dropped.
std::optional<std::string> iso_date(std::optional<std::string> raw) {
  if (!raw || raw->empty()) return std::nullopt;
  const std::string& s = *raw;
  bool ok = s.size() >= 10 && s[4] == '-' && s[7] == '-';
  for (int i : {0, 1, 2, 3, 5, 6, 8, 9}) ok = ok && is_digit(s[static_cast<std::size_t>(i)]);
  if (ok && s.size() > 10) ok = s[10] == 'T' || s[10] == ' ';
  if (!ok) throw std::invalid_argument("field 'date' is not an ISO-8601 date: " + s);
  return s.substr(0, 10);
}

ordered_json opt_to_json(const std::optional<std::string>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

}  // namespace

RawDecision raw_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("record is not a JSON object");
  auto id = j.find("id");
  if (id == j.end() || !id->is_number_integer())
    throw std::invalid_argument("missing or non-integer 'id'");
  auto content = j.find("content");
  if (content == j.end()) throw std::invalid_argument("missing 'content'");
  if (!content->is_null() && !content->is_string())
    throw std::invalid_argument("field 'content' is not a string");

  RawDecision d;
  d.id = id->get<DecisionId>();
  d.content = content->is_null() ? std::string() : content->get<std::string>();
  d.file_number = opt_string(j, "file_number").value_or("");
  d.date = iso_date(opt_string(j, "date"));
  d.decision_type = opt_string(j, "type");
  d.ecli = opt_string(j, "ecli");

  auto court = j.find("court");
  if (court != j.end() && court->is_object()) {
    if (auto cid = opt_id(*court, "id")) d.court_raw.court_id = *cid;
    d.court_raw.name = opt_string(*court, "name").value_or("");
    d.court_raw.state_id = opt_id(*court, "state_id");
    if (!d.court_raw.state_id) d.court_raw.state_id = opt_id(*court, "state");
    d.court_raw.city_id = opt_id(*court, "city_id");
    if (!d.court_raw.city_id) d.court_raw.city_id = opt_id(*court, "city");
  }
  return d;
}

ordered_json to_json(const RawDecision& d) {
  ordered_json court = {{"id", d.court_raw.court_id}, {"name", d.court_raw.name}};
  court["state"] = d.court_raw.state_id ? ordered_json(*d.court_raw.state_id) : ordered_json(nullptr);
  court["city"] = d.court_raw.city_id ? ordered_json(*d.court_raw.city_id) : ordered_json(nullptr);
  ordered_json j;
  j["id"] = d.id;
  j["file_number"] = d.file_number;
  j["date"] = opt_to_json(d.date);
  j["type"] = opt_to_json(d.decision_type);
  j["ecli"] = opt_to_json(d.ecli);
  j["court"] = std::move(court);
  j["content"] = d.content;
  return j;
}

ordered_json to_json(const LegalReference& ref) {
  ordered_json j;
  j["ref_type"] = std::string(to_string(ref.ref_type));
  j["raw_text"] = ref.raw_text;
  if (!ref.parsed) {
    j["parsed"] = nullptr;
    return j;
  }
  ordered_json p = ordered_json::object();
  if (ref.parsed->code) p["code"] = *ref.parsed->code;
  if (ref.parsed->section) p["section"] = *ref.parsed->section;
  if (ref.parsed->docket) p["docket"] = *ref.parsed->docket;
  if (!ref.parsed->known_code) p["unknown_code"] = true;
  j["parsed"] = std::move(p);
  return j;
}

LegalReference legal_reference_from_json(const json& j) {
  LegalReference ref;
  const std::string type = j.at("ref_type").get<std::string>();
  if (type == "law") {
    ref.ref_type = RefType::law;
  } else if (type == "case") {
    ref.ref_type = RefType::case_;
  } else {
    throw std::invalid_argument("unknown ref_type: " + type);
  }
  ref.raw_text = j.at("raw_text").get<std::string>();
  auto parsed = j.find("parsed");
  if (parsed != j.end() && parsed->is_object()) {
    ParsedReference p;
    p.code = opt_string(*parsed, "code");
    p.section = opt_string(*parsed, "section");
    p.docket = opt_string(*parsed, "docket");
    p.known_code = !parsed->value("unknown_code", false);
    ref.parsed = std::move(p);
  }
  return ref;
}

ordered_json to_json(const SegmentedDecision& d) {
  ordered_json j;
  j["id"] = d.id;
  j["file_number"] = d.file_number;
  j["date"] = opt_to_json(d.date);
  j["type"] = opt_to_json(d.decision_type);
  j["ecli"] = opt_to_json(d.ecli);
  j["court"] = ordered_json{{"name", d.court.name}, {"state", d.court.state}, {"city", d.court.city}};
  j["tenor"] = d.tenor;
  j["tatbestand"] = d.tatbestand;
  j["entscheidungsgruende"] = d.entscheidungsgruende;
  j["rechtsmittelbelehrung"] = d.rechtsmittelbelehrung;
  ordered_json refs = ordered_json::array();
  for (const auto& r : d.references) refs.push_back(to_json(r));
  j["references"] = std::move(refs);
  return j;
}

SegmentedDecision segmented_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("record is not a JSON object");
  SegmentedDecision d;
  d.id = j.at("id").get<DecisionId>();
  d.file_number = j.value("file_number", "");
  d.date = opt_string(j, "date");
  d.decision_type = opt_string(j, "type");
  d.ecli = opt_string(j, "ecli");
  const json& court = j.at("court");
  d.court.name = court.at("name").get<std::string>();
  d.court.state = court.at("state").get<std::string>();
  d.court.city = court.at("city").get<std::string>();
  d.tenor = j.at("tenor").get<std::string>();
  d.tatbestand = j.at("tatbestand").get<std::string>();
  d.entscheidungsgruende = j.at("entscheidungsgruende").get<std::string>();
  d.rechtsmittelbelehrung = j.at("rechtsmittelbelehrung").get<std::string>();
  for (const auto& r : j.at("references")) d.references.push_back(legal_reference_from_json(r));
  return d;
}

std::string to_jsonl_line(const SegmentedDecision& d) {
  return to_json(d).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

namespace {

template <typename Record>
Record parse_record(const json& j);

template <>
RawDecision parse_record<RawDecision>(const json& j) {
  return raw_from_json(j);
}

template <>
SegmentedDecision parse_record<SegmentedDecision>(const json& j) {
  return segmented_from_json(j);
}

bool is_blank(const std::string& s) {
  return s.find_first_not_of(" \t\r\n") == std::string::npos;
}

}  // namespace

template <typename Record>
std::optional<typename JsonlReader<Record>::Item> JsonlReader<Record>::next() {
  while (std::getline(*in_, buffer_)) {
    ++line_number_;
    if (is_blank(buffer_)) continue;
    try {
      return Item(parse_record<Record>(json::parse(buffer_)));
    } catch (const std::exception& e) {
      return Item(RecordError{line_number_, e.what()});
    }
  }
  return std::nullopt;
}

template class JsonlReader<RawDecision>;
template class JsonlReader<SegmentedDecision>;

void SegmentedStreamWriter::write(const SegmentedDecision& d) {
  std::string line = to_jsonl_line(d);
  line.push_back('\n');
  out_->write(line.data(), static_cast<std::streamsize>(line.size()));
  if (!*out_) throw std::ios_base::failure("write failed after " + std::to_string(count_) + " records");
  ++count_;
}

namespace {

template <typename Record>
ReadAll<Record> drain(std::istream& in) {
  ReadAll<Record> out;
  JsonlReader<Record> reader(in);
  while (auto item = reader.next()) {
    if (auto* r = std::get_if<Record>(&*item)) {
      out.records.push_back(std::move(*r));
    } else {
      out.errors.push_back(std::get<RecordError>(*item));
    }
  }
  return out;
}

}  // namespace

ReadAll<RawDecision> read_all_raw(std::istream& in) { return drain<RawDecision>(in); }
ReadAll<SegmentedDecision> read_all_segmented(std::istream& in) { return drain<SegmentedDecision>(in); }

}  // namespace olseg
