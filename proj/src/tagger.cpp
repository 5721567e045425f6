#include "dxaug/tagger.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "dxaug/errors.hpp"

namespace dxaug {

std::string_view to_string(AxisLabel label) {
  switch (label) {
    case AxisLabel::Center: return "center";
    case AxisLabel::Region: return "region";
    case AxisLabel::Characteristic: return "characteristic";
  }
  return "?";
}

std::string_view bio_tag(AxisLabel label) {
  switch (label) {
    case AxisLabel::Center: return "CEN";
    case AxisLabel::Region: return "REG";
    case AxisLabel::Characteristic: return "CHAR";
  }
  return "?";
}

std::optional<AxisLabel> parse_axis_label(std::string_view name) {
  for (AxisLabel l : kAllAxes) {
    if (name == to_string(l) || name == bio_tag(l)) return l;
  }
  if (name == "Center") return AxisLabel::Center;
  if (name == "Region") return AxisLabel::Region;
  if (name == "Characteristic") return AxisLabel::Characteristic;
  return std::nullopt;
}

void validate_spans(const TermText& term, const std::vector<AxisSpan>& spans) {
  std::size_t prev_end = 0;
  for (const AxisSpan& s : spans) {
    if (s.start >= s.end || s.end > term.length()) {
      throw std::invalid_argument("span out of bounds");
    }
    if (s.start < prev_end) {
      throw std::invalid_argument("spans overlap or are unsorted");
    }
    prev_end = s.end;
  }
}

LexiconTagger::LexiconTagger(const AxisLexicons& lexicons) {
  auto add = [this](const std::set<std::string>& entries, AxisLabel label) {
    for (const std::string& e : entries) {
      std::u32string cps = utf8_to_u32(e);
      if (cps.empty()) continue;
      max_len_ = std::max(max_len_, cps.size());
      entries_.emplace(std::move(cps), label);  // first label wins
    }
  };
  add(lexicons.centers, AxisLabel::Center);
  add(lexicons.regions, AxisLabel::Region);
  add(lexicons.characteristics, AxisLabel::Characteristic);
}

TaggedTerm LexiconTagger::tag(const TermText& term) const {
  const std::u32string& cps = term.codepoints();
  const std::size_t n = cps.size();

  std::vector<AxisSpan> candidates;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t len = 1; len <= max_len_ && i + len <= n; ++len) {
      auto it = entries_.find(cps.substr(i, len));
      if (it != entries_.end()) candidates.push_back({i, i + len, it->second});
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const AxisSpan& a, const AxisSpan& b) {
              std::size_t la = a.end - a.start;
              std::size_t lb = b.end - b.start;
              return la != lb ? la > lb : a.start < b.start;
            });

  std::vector<bool> taken(n, false);
  std::vector<AxisSpan> spans;
  for (const AxisSpan& c : candidates) {
    bool free = std::none_of(taken.begin() + static_cast<std::ptrdiff_t>(c.start),
                             taken.begin() + static_cast<std::ptrdiff_t>(c.end),
                             [](bool t) { return t; });
    if (!free) continue;
    std::fill(taken.begin() + static_cast<std::ptrdiff_t>(c.start),
              taken.begin() + static_cast<std::ptrdiff_t>(c.end), true);
    spans.push_back(c);
  }
  std::sort(spans.begin(), spans.end(),
            [](const AxisSpan& a, const AxisSpan& b) { return a.start < b.start; });
  return TaggedTerm{term, std::move(spans)};
}

TaggedTerm tag(const TermText& term, const AxisLexicons& lexicons) {
  return LexiconTagger(lexicons).tag(term);
}

PretaggedTagger::PretaggedTagger(std::vector<TaggedTerm> tagged,
                                 std::shared_ptr<const Tagger> fallback)
    : fallback_(std::move(fallback)) {
  for (TaggedTerm& t : tagged) {
    std::string key = t.term.raw();
    tagged_.insert_or_assign(std::move(key), std::move(t));
  }
}

TaggedTerm PretaggedTagger::tag(const TermText& term) const {
  auto it = tagged_.find(term.raw());
  if (it != tagged_.end()) return it->second;
  if (fallback_) return fallback_->tag(term);
  return TaggedTerm{term, {}};
}

std::vector<TaggedTerm> read_pretagged(std::istream& in,
                                       const std::string& source) {
  using nlohmann::json;
  std::vector<TaggedTerm> out;
  for (auto& [lineno, line] : read_record_lines(in)) {
    try {
      json j = json::parse(line);
      TermText term(j.at("term").get<std::string>());
      std::vector<AxisSpan> spans;
      for (const json& s : j.at("spans")) {
        auto label = parse_axis_label(s.at("label").get<std::string>());
        if (!label) throw std::invalid_argument("unknown axis label");
        spans.push_back({s.at("start").get<std::size_t>(),
                         s.at("end").get<std::size_t>(), *label});
      }
      std::sort(spans.begin(), spans.end(),
                [](const AxisSpan& a, const AxisSpan& b) {
                  return a.start < b.start;
                });
      validate_spans(term, spans);
      out.push_back(TaggedTerm{std::move(term), std::move(spans)});
    } catch (const json::exception& e) {
      throw InputError(source, lineno, std::string("malformed record: ") + e.what());
    } catch (const std::invalid_argument& e) {
      throw InputError(source, lineno, e.what());
    }
  }
  return out;
}

std::vector<TaggedTerm> load_pretagged(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path, 0, "cannot open file");
  return read_pretagged(in, path);
}

std::vector<std::string> spans_to_bio(const TaggedTerm& tagged) {
  std::vector<std::string> out(tagged.term.length(), "O");
  for (const AxisSpan& s : tagged.spans) {
    std::string tag(bio_tag(s.label));
    out[s.start] = "B-" + tag;
    for (std::size_t i = s.start + 1; i < s.end; ++i) out[i] = "I-" + tag;
  }
  return out;
}

std::vector<AxisSpan> bio_to_spans(const std::vector<std::string>& bio) {
  std::vector<AxisSpan> spans;
  bool open = false;
  for (std::size_t i = 0; i < bio.size(); ++i) {
    const std::string& t = bio[i];
    if (t == "O") {
      open = false;
      continue;
    }
    if (t.size() < 3 || (t[0] != 'B' && t[0] != 'I') || t[1] != '-') {
      throw std::invalid_argument("bad BIO tag: " + t);
    }
    auto label = parse_axis_label(std::string_view(t).substr(2));
    if (!label) throw std::invalid_argument("bad BIO label: " + t);
    if (t[0] == 'I' && open && spans.back().label == *label) {
      spans.back().end = i + 1;
    } else {
      spans.push_back({i, i + 1, *label});
      open = true;
    }
  }
  return spans;
}

std::optional<AxisSpan> axis_span(const TaggedTerm& tagged, AxisLabel label) {
  for (const AxisSpan& s : tagged.spans) {
    if (s.label == label) return s;
  }
  return std::nullopt;
}

std::optional<std::string> axis_value(const TaggedTerm& tagged,
                                      AxisLabel label) {
  auto s = axis_span(tagged, label);
  if (!s) return std::nullopt;
  return tagged.term.substr(s->start, s->end);
}

}  // namespace dxaug
