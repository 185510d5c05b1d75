#include "olseg/reference_extract.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <tuple>

#include "olseg/text.hpp"

namespace olseg {

namespace {

constexpr std::string_view kParagraph = "\xC2\xA7";  // §

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
bool is_ascii_letter(char c) { return is_upper(c) || is_lower(c); }

// Letter test that also accepts the German umlauts and ß.
bool letter_at(std::string_view s, std::size_t pos, std::size_t* len = nullptr) {
  if (pos >= s.size()) return false;
  const auto cp = text::decode(s, pos);
  if (len != nullptr) *len = cp.length;
  if (!cp.valid) return false;
  const char32_t v = cp.value;
  return (v < 0x80 && is_ascii_letter(static_cast<char>(v))) || v == 0xC4 || v == 0xD6 || v == 0xDC ||
         v == 0xE4 || v == 0xF6 || v == 0xFC || v == 0xDF;
}

bool alnum_at(std::string_view s, std::size_t pos) {
  return pos < s.size() && (is_digit(s[pos]) || letter_at(s, pos));
}

// True if the byte before pos does not continue a word.
bool word_start(std::string_view s, std::size_t pos) {
  if (pos == 0) return true;
  const char c = s[pos - 1];
  if (is_digit(c) || is_ascii_letter(c)) return false;
  // Trailing byte of a multi-byte letter.
  if ((static_cast<unsigned char>(c) & 0xC0) == 0x80) {
    std::size_t start = pos - 1;
    while (start > 0 && (static_cast<unsigned char>(s[start]) & 0xC0) == 0x80) --start;
    return !letter_at(s, start);
  }
  return true;
}

bool is_roman(std::string_view token) {
  return !token.empty() && std::all_of(token.begin(), token.end(), [](char c) {
    return c == 'I' || c == 'V' || c == 'X' || c == 'L';
  });
}

constexpr std::array<std::string_view, 16> kQualifiers{
    "Absatz", "Abs.", "Satz", "S.", "Nummer", "Nr.", "lit.", "Buchst.",
    "Alt.", "Var.", "Halbsatz", "Halbs.", "Hs.", "Unterabs.", "UAbs.", "Ziff."};

constexpr std::array<std::string_view, 4> kConnectors{",", "und", "bis", "oder"};

class LawParser {
public:
  LawParser(std::string_view s, std::size_t start, const KnownCodes& codes) : s_(s), pos_(start), codes_(codes) {}

  std::vector<ReferenceMatch> parse() {
    const std::size_t begin = pos_;
    bool multi = false;
    if (consume(kParagraph)) {
      skip_spaces();
      multi = consume(kParagraph);
    } else if (consume("Artikel")) {
      // single article
    } else if (consume("Art.")) {
      // single article
    } else {
      return {};
    }
    skip_spaces();
    if (!at_digit()) return {};

    std::vector<std::string> sections;
    std::size_t end = pos_;
    while (true) {
      sections.push_back(number());
      end = pos_;
      end = qualifiers(end, multi);
      const std::size_t save = pos_;
      if (connector() && at_digit()) {
        if (multi) continue;
        number();
        end = qualifiers(pos_, multi);
        break;
      }
      pos_ = save;
      break;
    }

    pos_ = end;
    std::optional<std::string> code;
    bool known = true;
    const std::size_t save = pos_;
    skip_spaces();
    if (auto token = code_token()) {
      code = std::move(token->first);
      known = token->second;
      end = pos_;
    } else {
      pos_ = save;
    }

    std::vector<ReferenceMatch> out;
    const std::string raw(s_.substr(begin, end - begin));
    for (auto& section : sections) {
      ReferenceMatch m;
      m.begin = begin;
      m.end = end;
      m.reference.ref_type = RefType::law;
      m.reference.raw_text = raw;
      ParsedReference parsed;
      parsed.code = code;
      parsed.section = std::move(section);
      parsed.known_code = known;
      m.reference.parsed = std::move(parsed);
      out.push_back(std::move(m));
    }
    return out;
  }

private:
  bool consume(std::string_view lit) {
    if (s_.substr(pos_).starts_with(lit)) {
      pos_ += lit.size();
      return true;
    }
    return false;
  }

  void skip_spaces() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }

  bool at_digit() const { return pos_ < s_.size() && is_digit(s_[pos_]); }

  // Digits with an optional attached lowercase letter ("573c").
  std::string number() {
    const std::size_t start = pos_;
    while (at_digit()) ++pos_;
    if (pos_ < s_.size() && is_lower(s_[pos_]) && !alnum_at(s_, pos_ + 1)) ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }

  // Token after a qualifier keyword: number, single letter or roman numeral.
  bool qualifier_value() {
    if (at_digit()) {
      number();
      return true;
    }
    if (pos_ < s_.size() && is_lower(s_[pos_]) && !alnum_at(s_, pos_ + 1)) {
      ++pos_;
      if (pos_ < s_.size() && s_[pos_] == ')') ++pos_;
      return true;
    }
    std::size_t k = pos_;
    while (k < s_.size() && (s_[k] == 'I' || s_[k] == 'V' || s_[k] == 'X')) ++k;
    if (k > pos_ && !alnum_at(s_, k)) {
      pos_ = k;
      return true;
    }
    return false;
  }

  // "f."/"ff." after a number.
  bool following_marker() {
    const std::size_t save = pos_;
    skip_spaces();
    if (consume("ff.") || consume("f.")) return true;
    pos_ = save;
    return false;
  }

  bool connector() {
    skip_spaces();
    for (auto c : kConnectors) {
      if (s_.substr(pos_).starts_with(c) && (c == "," || !alnum_at(s_, pos_ + c.size()))) {
        pos_ += c.size();
        skip_spaces();
        return true;
      }
    }
    return false;
  }

  // Consumes qualifier chains; returns the end of the last consumed token.
  std::size_t qualifiers(std::size_t end, bool multi) {
    while (true) {
      if (following_marker()) {
        end = pos_;
        continue;
      }
      const std::size_t save = pos_;
      skip_spaces();
      bool matched = false;
      for (auto q : kQualifiers) {
        if (!consume(q)) continue;
        if (q.back() != '.' && alnum_at(s_, pos_)) {
          pos_ -= q.size();
          continue;
        }
        skip_spaces();
        if (qualifier_value()) {
          matched = true;
          break;
        }
        pos_ -= q.size();
      }
      if (!matched) {
        // Old style paragraph numbering: "§ 5 II BGB".
        pos_ = save;
        skip_spaces();
        std::size_t k = pos_;
        while (k < s_.size() && (s_[k] == 'I' || s_[k] == 'V' || s_[k] == 'X')) ++k;
        if (k > pos_ && !alnum_at(s_, k) && looks_like_code_after(k)) {
          pos_ = k;
          end = pos_;
          continue;
        }
        pos_ = save;
        return end;
      }
      end = pos_;
      // Enumerated qualifier values ("Abs. 1 und 2") in a single citation.
      while (!multi) {
        const std::size_t before = pos_;
        if (connector() && qualifier_value()) {
          end = pos_;
          continue;
        }
        pos_ = before;
        break;
      }
    }
  }

  bool looks_like_code_after(std::size_t k) const {
    std::size_t p = k;
    while (p < s_.size() && s_[p] == ' ') ++p;
    return p > k && p < s_.size() && is_upper(s_[p]);
  }

  // Code token with known flag; handles "SGB V" style books.
  std::optional<std::pair<std::string, bool>> code_token() {
    if (pos_ >= s_.size() || !is_upper(s_[pos_])) return std::nullopt;
    const std::size_t start = pos_;
    std::size_t chars = 0;
    int uppers = 0;
    std::size_t k = pos_;
    while (k < s_.size()) {
      std::size_t len = 1;
      if (letter_at(s_, k, &len)) {
        if (is_upper(s_[k])) ++uppers;
      } else if (!is_digit(s_[k])) {
        break;
      }
      k += len;
      ++chars;
    }
    if (chars < 2 || chars > 10) return std::nullopt;
    if (k < s_.size() && s_[k] == '-') return std::nullopt;
    std::string code(s_.substr(start, k - start));
    if (is_roman(code)) return std::nullopt;
    const bool known = codes_.contains(code);
    if (!known && uppers < 2) return std::nullopt;
    pos_ = k;

    // Book number: "SGB V", "SGB XII".
    std::size_t p = pos_;
    if (p < s_.size() && s_[p] == ' ') {
      ++p;
      std::size_t q = p;
      while (q < s_.size() && (s_[q] == 'I' || s_[q] == 'V' || s_[q] == 'X')) ++q;
      if (q > p && !alnum_at(s_, q) && code == "SGB") {
        code = std::string(s_.substr(start, q - start));
        pos_ = q;
      }
    }
    return std::make_pair(std::move(code), known);
  }

  std::string_view s_;
  std::size_t pos_;
  const KnownCodes& codes_;
};

bool is_senate(std::string_view token) {
  if (token.empty() || token.size() > 4) return false;
  if (std::all_of(token.begin(), token.end(), is_digit)) return token.size() <= 3;
  return is_roman(token);
}

// Docket ending with the "/yy" at slash. Returns [begin, end) on success.
std::optional<std::pair<std::size_t, std::size_t>> docket_at(std::string_view s, std::size_t slash) {
  // Year: 2 or 4 digits.
  std::size_t y = slash + 1;
  while (y < s.size() && is_digit(s[y])) ++y;
  const std::size_t year_len = y - slash - 1;
  if (year_len != 2 && year_len != 4) return std::nullopt;
  if (alnum_at(s, y)) return std::nullopt;

  // Running number.
  std::size_t n = slash;
  while (n > 0 && is_digit(s[n - 1])) --n;
  if (n == slash || slash - n > 6) return std::nullopt;
  if (n == 0 || s[n - 1] != ' ') return std::nullopt;

  // Register token: letters, starts uppercase, 1-5 chars.
  std::size_t r_end = n - 1;
  std::size_t r = r_end;
  while (r > 0 && is_ascii_letter(s[r - 1])) --r;
  if (r == r_end || r_end - r > 5 || !is_upper(s[r])) return std::nullopt;
  if (r == 0 || s[r - 1] != ' ') return std::nullopt;

  // Senate number: digits or roman numeral, preceded by a word boundary.
  std::size_t sen_end = r - 1;
  std::size_t sen = sen_end;
  while (sen > 0 && (is_digit(s[sen - 1]) || is_upper(s[sen - 1]))) --sen;
  if (!is_senate(s.substr(sen, sen_end - sen)) || !word_start(s, sen)) return std::nullopt;

  std::size_t begin = sen;
  // Single-letter prefix of social and some lower courts ("L 9 AS ...").
  if (sen >= 2 && s[sen - 1] == ' ' && is_upper(s[sen - 2]) && word_start(s, sen - 2) &&
      s[sen - 2] != 'I' && s[sen - 2] != 'V' && s[sen - 2] != 'X') {
    begin = sen - 2;
  }
  return std::make_pair(begin, y);
}

std::vector<ReferenceMatch> find_case_references(std::string_view s) {
  std::vector<ReferenceMatch> out;
  for (std::size_t slash = s.find('/'); slash != std::string_view::npos; slash = s.find('/', slash + 1)) {
    if (auto span = docket_at(s, slash)) {
      ReferenceMatch m;
      m.begin = span->first;
      m.end = span->second;
      m.reference.ref_type = RefType::case_;
      m.reference.raw_text = std::string(s.substr(m.begin, m.end - m.begin));
      ParsedReference parsed;
      parsed.docket = m.reference.raw_text;
      m.reference.parsed = std::move(parsed);
      out.push_back(std::move(m));
    }
  }
  for (std::size_t at = s.find("ECLI:"); at != std::string_view::npos; at = s.find("ECLI:", at + 1)) {
    if (!word_start(s, at)) continue;
    std::size_t end = at + 5;
    while (end < s.size() && (is_ascii_letter(s[end]) || is_digit(s[end]) || s[end] == ':' || s[end] == '.')) ++end;
    while (end > at + 5 && (s[end - 1] == '.' || s[end - 1] == ':')) --end;
    // Country code plus at least court, year and ordinal parts.
    const std::string_view id = s.substr(at, end - at);
    if (std::count(id.begin(), id.end(), ':') < 4) continue;
    ReferenceMatch m;
    m.begin = at;
    m.end = end;
    m.reference.ref_type = RefType::case_;
    m.reference.raw_text = std::string(id);
    ParsedReference parsed;
    parsed.docket = m.reference.raw_text;
    m.reference.parsed = std::move(parsed);
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<ReferenceMatch> find_law_references(std::string_view s, const KnownCodes& codes) {
  std::vector<ReferenceMatch> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const bool paragraph = s.substr(pos).starts_with(kParagraph);
    const bool article = s[pos] == 'A' && (s.substr(pos).starts_with("Art.") || s.substr(pos).starts_with("Artikel")) &&
                         word_start(s, pos);
    if (paragraph || article) {
      auto found = LawParser(s, pos, codes).parse();
      if (!found.empty()) {
        pos = found.front().end;
        for (auto& m : found) out.push_back(std::move(m));
        continue;
      }
      pos += paragraph ? kParagraph.size() : 1;
      continue;
    }
    ++pos;
  }
  return out;
}

const std::set<std::string, std::less<>>& default_code_set() {
  static const std::set<std::string, std::less<>> codes{
      "BGB",    "ZPO",     "StGB",   "StPO",    "GG",     "VwGO",   "SGB",    "HGB",    "AO",     "UrhG",
      "AEUV",   "AktG",    "AGG",    "ArbGG",   "AsylG",  "AufenthG", "BauGB", "BauNVO", "BBG",   "BDSG",
      "BeamtStG", "BetrAVG", "BetrVG", "BImSchG", "BtMG",  "BVerfGG", "DSGVO", "EGBGB",  "EMRK",   "ErbStG",
      "EStG",   "EUV",     "FamFG",  "FeV",     "FGO",    "GBO",    "GewO",   "GewStG", "GKG",    "GmbHG",
      "GVG",    "GWB",     "IfSG",   "InsO",    "JGG",    "KostO",  "KSchG",  "KStG",   "MarkenG", "OWiG",
      "PatG",   "RVG",     "SGG",    "StVG",    "StVO",   "TzBfG",  "UStG",   "UWG",    "VVG",    "VwVfG",
      "VwZG",   "WaffG",   "WEG",    "ZVG",     "BRAO",   "GNotKG", "FamGKG", "JVEG",   "LPartG", "WpHG"};
  return codes;
}

}  // namespace

const KnownCodes& KnownCodes::defaults() {
  static const KnownCodes codes(default_code_set());
  return codes;
}

KnownCodes KnownCodes::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read known-codes file: " + path.string());
  KnownCodes out;
  std::string line;
  while (std::getline(in, line)) {
    const std::string code = text::normalize_line(line);
    if (code.empty() || code.front() == '#') continue;
    out.add(code);
  }
  return out;
}

bool KnownCodes::contains(std::string_view code) const {
  if (codes_.find(code) != codes_.end()) return true;
  const std::size_t space = code.find(' ');
  return space != std::string_view::npos && is_roman(code.substr(space + 1)) &&
         codes_.find(code.substr(0, space)) != codes_.end();
}

std::vector<ReferenceMatch> find_references(std::string_view line, const KnownCodes& codes) {
  std::vector<ReferenceMatch> all = find_law_references(line, codes);
  for (auto& m : find_case_references(line)) all.push_back(std::move(m));

  // Group matches that share a span (enumerations), then keep the longest
  // of any overlapping groups.
  std::stable_sort(all.begin(), all.end(), [](const ReferenceMatch& a, const ReferenceMatch& b) {
    if (a.begin != b.begin) return a.begin < b.begin;
    return (a.end - a.begin) > (b.end - b.begin);
  });
  std::vector<ReferenceMatch> out;
  std::size_t i = 0;
  while (i < all.size()) {
    std::size_t j = i;
    while (j < all.size() && all[j].begin == all[i].begin && all[j].end == all[i].end) ++j;
    const std::size_t len = all[i].end - all[i].begin;
    bool keep = true;
    for (const auto& prev : out) {
      if (prev.begin < all[i].end && all[i].begin < prev.end) {
        keep = false;
        break;
      }
    }
    if (keep) {
      // A later group that overlaps and is longer wins.
      for (std::size_t k = j; k < all.size() && all[k].begin < all[i].end; ++k) {
        if (all[k].end - all[k].begin > len) {
          keep = false;
          break;
        }
      }
    }
    if (keep) {
      for (std::size_t k = i; k < j; ++k) out.push_back(std::move(all[k]));
    }
    i = j;
  }
  return out;
}

ExtractedReferences extract_references_counted(std::span<const std::string> lines, const KnownCodes& codes) {
  ExtractedReferences out;
  for (const auto& line : lines) {
    for (auto& m : find_references(line, codes)) {
      const auto it = std::find(out.references.begin(), out.references.end(), m.reference);
      if (it != out.references.end()) {
        ++out.occurrences[static_cast<std::size_t>(it - out.references.begin())];
      } else {
        out.references.push_back(std::move(m.reference));
        out.occurrences.push_back(1);
      }
    }
  }
  return out;
}

std::vector<LegalReference> extract_references(std::span<const std::string> lines, const KnownCodes& codes) {
  return extract_references_counted(lines, codes).references;
}

}  // namespace olseg
