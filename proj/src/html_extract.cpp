#include "olseg/html_extract.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <optional>
#include <utility>

#include "olseg/text.hpp"

namespace olseg {

std::string_view to_string(SourceTag tag) {
  switch (tag) {
    case SourceTag::p: return "p";
    case SourceTag::h1: return "h1";
    case SourceTag::h2: return "h2";
    case SourceTag::h3: return "h3";
    case SourceTag::h4: return "h4";
    case SourceTag::td: return "td";
    case SourceTag::rd: return "rd";
  }
  return "p";
}

std::string normalize_line(std::string_view raw) { return text::normalize_line(raw); }

namespace {

struct NamedEntity {
  std::string_view name;
  char32_t cp;
};

// Sorted by name for binary search.
constexpr std::array<NamedEntity, 62> kEntities{{
    {"AElig", 0xC6},  {"Aacute", 0xC1}, {"Agrave", 0xC0}, {"Auml", 0xC4},
    {"Eacute", 0xC9}, {"Ouml", 0xD6},   {"Uuml", 0xDC},   {"aacute", 0xE1},
    {"aelig", 0xE6},  {"agrave", 0xE0}, {"amp", '&'},     {"apos", '\''},
    {"auml", 0xE4},   {"bdquo", 0x201E}, {"bull", 0x2022}, {"ccedil", 0xE7},
    {"copy", 0xA9},   {"deg", 0xB0},    {"eacute", 0xE9}, {"egrave", 0xE8},
    {"emsp", 0x2003}, {"ensp", 0x2002}, {"euro", 0x20AC}, {"frac12", 0xBD},
    {"gt", '>'},      {"hellip", 0x2026}, {"iacute", 0xED}, {"iexcl", 0xA1},
    {"laquo", 0xAB},  {"ldquo", 0x201C}, {"lrm", 0x200E},  {"lsaquo", 0x2039},
    {"lsquo", 0x2018}, {"lt", '<'},     {"mdash", 0x2014}, {"middot", 0xB7},
    {"nbsp", 0xA0},   {"ndash", 0x2013}, {"oacute", 0xF3}, {"ordm", 0xBA},
    {"ouml", 0xF6},   {"para", 0xB6},   {"quot", '"'},    {"raquo", 0xBB},
    {"rdquo", 0x201D}, {"reg", 0xAE},   {"rlm", 0x200F},  {"rsaquo", 0x203A},
    {"rsquo", 0x2019}, {"sbquo", 0x201A}, {"sect", 0xA7},  {"shy", 0xAD},
    {"sup1", 0xB9},   {"sup2", 0xB2},   {"sup3", 0xB3},   {"szlig", 0xDF},
    {"thinsp", 0x2009}, {"times", 0xD7}, {"uacute", 0xFA}, {"uuml", 0xFC},
    {"zwj", 0x200D},  {"zwnj", 0x200C},
}};

static_assert(std::is_sorted(kEntities.begin(), kEntities.end(),
                             [](const NamedEntity& a, const NamedEntity& b) { return a.name < b.name; }));

char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c + 32) : c; }

bool is_ascii_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

bool is_tag_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; }

std::optional<SourceTag> allowed_tag(std::string_view name) {
  if (name == "p") return SourceTag::p;
  if (name == "h1") return SourceTag::h1;
  if (name == "h2") return SourceTag::h2;
  if (name == "h3") return SourceTag::h3;
  if (name == "h4") return SourceTag::h4;
  if (name == "td") return SourceTag::td;
  if (name == "rd") return SourceTag::rd;
  return std::nullopt;
}

template <std::size_t N>
bool one_of(std::string_view name, const std::array<std::string_view, N>& set) {
  return std::find(set.begin(), set.end(), name) != set.end();
}

constexpr std::array<std::string_view, 14> kVoid{
    "area", "base", "br", "col", "embed", "hr", "img", "input", "link", "meta", "param", "source", "track", "wbr"};

// Start tags that implicitly close an open <p>.
constexpr std::array<std::string_view, 27> kClosesP{
    "address", "article", "aside", "blockquote", "center", "dd", "div", "dl", "dt",
    "fieldset", "figure", "footer", "form", "h1", "h2", "h3", "h4", "h5", "h6",
    "header", "hr", "li", "ol", "p", "pre", "section", "table"};

// Elements whose boundaries separate words.
constexpr std::array<std::string_view, 22> kBlock{
    "address", "article", "aside", "blockquote", "br", "dd", "div", "dl", "dt", "figure",
    "footer", "form", "h5", "h6", "header", "hr", "li", "ol", "pre", "section", "tr", "ul"};

constexpr std::array<std::string_view, 2> kRawText{"script", "style"};

struct Frame {
  std::string name;
  std::optional<SourceTag> tag;
  std::string buffer;
};

class Extractor {
public:
  explicit Extractor(std::string_view html) : html_(html) {}

  ExtractResult run() {
    if (html_.find('\0') != std::string_view::npos) {
      result_.warnings.emplace_back("content contains NUL bytes; treated as unparseable");
      return std::move(result_);
    }
    while (pos_ < html_.size()) {
      if (html_[pos_] == '<' && try_markup()) continue;
      text_run();
    }
    while (!stack_.empty()) pop_frame();
    return std::move(result_);
  }

private:
  void text_run() {
    // A '<' that did not start markup is literal text.
    std::size_t end = html_.find('<', pos_ + 1);
    if (end == std::string_view::npos) end = html_.size();
    append_text(html_.substr(pos_, end - pos_));
    pos_ = end;
  }

  void append_text(std::string_view raw) {
    Frame* owner = innermost_allowed();
    if (owner == nullptr) return;
    std::string& out = owner->buffer;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] != '&') {
        out.push_back(raw[i]);
        continue;
      }
      const std::size_t semi = raw.find(';', i + 1);
      if (semi != std::string_view::npos && semi - i <= 32) {
        const std::string decoded = decode_entity(raw.substr(i + 1, semi - i - 1));
        if (!decoded.empty()) {
          out += decoded;
          i = semi;
          continue;
        }
      }
      out.push_back('&');
    }
  }

  void append_space() {
    if (Frame* owner = innermost_allowed()) owner->buffer.push_back(' ');
  }

  Frame* innermost_allowed() {
    for (auto it = stack_.rbegin(); it != stack_.rend(); ++it)
      if (it->tag) return &*it;
    return nullptr;
  }

  void emit(Frame& frame) {
    std::string line = text::normalize_line(frame.buffer);
    frame.buffer.clear();
    if (line.empty()) return;
    if (!result_.lines.empty() && result_.lines.back().text == line) return;
    result_.lines.push_back({std::move(line), *frame.tag});
  }

  void pop_frame() {
    Frame& top = stack_.back();
    if (top.tag) emit(top);
    const bool block = one_of(top.name, kBlock);
    stack_.pop_back();
    if (block) append_space();
  }

  // Returns false if the '<' at pos_ is not markup.
  bool try_markup() {
    const std::string_view rest = html_.substr(pos_);
    if (rest.starts_with("<!--")) {
      const std::size_t end = html_.find("-->", pos_ + 4);
      if (end == std::string_view::npos) {
        result_.warnings.emplace_back("unterminated comment");
        pos_ = html_.size();
      } else {
        pos_ = end + 3;
      }
      return true;
    }
    if (rest.starts_with("<!") || rest.starts_with("<?")) {
      skip_to_gt();
      return true;
    }
    const bool closing = rest.size() > 1 && rest[1] == '/';
    const std::size_t name_start = pos_ + (closing ? 2 : 1);
    if (name_start >= html_.size() || !is_ascii_alpha(html_[name_start])) return false;

    std::size_t i = name_start;
    std::string name;
    while (i < html_.size() && !is_tag_space(html_[i]) && html_[i] != '>' && html_[i] != '/') {
      name.push_back(ascii_lower(html_[i]));
      ++i;
    }
    // Attributes; quoted values may contain '>'.
    bool self_closing = false;
    char quote = 0;
    for (; i < html_.size(); ++i) {
      const char c = html_[i];
      if (quote != 0) {
        if (c == quote) quote = 0;
      } else if (c == '"' || c == '\'') {
        quote = c;
      } else if (c == '>') {
        break;
      } else if (c == '/') {
        self_closing = i + 1 < html_.size() && html_[i + 1] == '>';
      }
    }
    if (i >= html_.size()) {
      result_.warnings.emplace_back("unterminated tag <" + name);
      pos_ = html_.size();
      return true;
    }
    pos_ = i + 1;

    if (closing) {
      end_tag(name);
    } else {
      start_tag(name, self_closing);
    }
    return true;
  }

  void skip_to_gt() {
    const std::size_t end = html_.find('>', pos_);
    pos_ = end == std::string_view::npos ? html_.size() : end + 1;
  }

  void skip_raw_text(std::string_view name) {
    const std::string close = "</" + std::string(name);
    std::size_t i = pos_;
    while (true) {
      i = html_.find("</", i);
      if (i == std::string_view::npos) {
        pos_ = html_.size();
        return;
      }
      std::string candidate;
      for (std::size_t k = 0; k < close.size() && i + k < html_.size(); ++k)
        candidate.push_back(ascii_lower(html_[i + k]));
      if (candidate == close) {
        pos_ = i;
        skip_to_gt();
        return;
      }
      i += 2;
    }
  }

  void close_open_p() {
    for (std::size_t k = stack_.size(); k-- > 0;) {
      if (stack_[k].name == "p") {
        while (stack_.size() > k) pop_frame();
        return;
      }
      if (stack_[k].tag) return;  // another allowed element is innermost
    }
  }

  void close_open_cell() {
    for (std::size_t k = stack_.size(); k-- > 0;) {
      if (stack_[k].name == "td" || stack_[k].name == "th") {
        while (stack_.size() > k) pop_frame();
        return;
      }
      if (stack_[k].name == "table") return;
    }
  }

  void start_tag(const std::string& name, bool self_closing) {
    if (one_of(name, kRawText)) {
      if (!self_closing) skip_raw_text(name);
      return;
    }
    if (one_of(name, kClosesP)) close_open_p();
    if (name == "td" || name == "th" || name == "tr") close_open_cell();
    if (one_of(name, kBlock)) append_space();
    if (one_of(name, kVoid) || self_closing) return;

    const auto tag = allowed_tag(name);
    if (tag) {
      // Text seen so far in the enclosing allowed element precedes the child.
      if (Frame* owner = innermost_allowed()) emit(*owner);
    }
    stack_.push_back({name, tag, {}});
  }

  void end_tag(const std::string& name) {
    if (name == "br") {
      append_space();
      return;
    }
    for (std::size_t k = stack_.size(); k-- > 0;) {
      if (stack_[k].name == name) {
        while (stack_.size() > k) pop_frame();
        return;
      }
    }
    // Stray end tag: ignored.
  }

  std::string_view html_;
  std::size_t pos_ = 0;
  std::vector<Frame> stack_;
  ExtractResult result_;
};

}  // namespace

std::string decode_entity(std::string_view name) {
  std::string out;
  if (name.size() >= 2 && name[0] == '#') {
    const bool hex = name[1] == 'x' || name[1] == 'X';
    const std::string_view digits = name.substr(hex ? 2 : 1);
    std::uint32_t cp = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), cp, hex ? 16 : 10);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || digits.empty()) return out;
    if (cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return out;
    text::append_utf8(out, cp);
    return out;
  }
  const auto it = std::lower_bound(kEntities.begin(), kEntities.end(), name,
                                   [](const NamedEntity& e, std::string_view n) { return e.name < n; });
  if (it != kEntities.end() && it->name == name) text::append_utf8(out, it->cp);
  return out;
}

ExtractResult extract_lines(std::string_view html) { return Extractor(html).run(); }

std::vector<std::string> extract_texts(std::string_view html) {
  std::vector<std::string> out;
  for (auto& line : extract_lines(html).lines) out.push_back(std::move(line.text));
  return out;
}

}  // namespace olseg
