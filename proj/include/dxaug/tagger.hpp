#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dxaug/text.hpp"
#include "dxaug/vocab.hpp"

namespace dxaug {

enum class AxisLabel { Center, Region, Characteristic };

inline constexpr AxisLabel kAllAxes[] = {AxisLabel::Center, AxisLabel::Region,
                                         AxisLabel::Characteristic};

std::string_view to_string(AxisLabel label);   // "center", "region", ...
std::string_view bio_tag(AxisLabel label);     // "CEN", "REG", "CHAR"
std::optional<AxisLabel> parse_axis_label(std::string_view name);

// Code-point span [start, end).
struct AxisSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  AxisLabel label = AxisLabel::Center;

  bool operator==(const AxisSpan&) const = default;
};

struct TaggedTerm {
  TermText term;
  std::vector<AxisSpan> spans;  // sorted by start, non-overlapping

  bool operator==(const TaggedTerm&) const = default;
};

// Throws std::invalid_argument unless spans are in bounds, non-empty,
// sorted and pairwise disjoint.
void validate_spans(const TermText& term, const std::vector<AxisSpan>& spans);

class Tagger {
 public:
  virtual ~Tagger() = default;
  virtual TaggedTerm tag(const TermText& term) const = 0;
};

/// Greedy maximal-match tagger over the three axis lexicons.
///
/// Every lexicon occurrence in the term is a candidate. Candidates are taken
/// longest first, then by lower start offset, and accepted when they do not
/// overlap an already accepted span. A string listed in more than one
/// lexicon is labelled Center, then Region, then Characteristic.
class LexiconTagger : public Tagger {
 public:
  explicit LexiconTagger(const AxisLexicons& lexicons);
  TaggedTerm tag(const TermText& term) const override;

 private:
  std::unordered_map<std::u32string, AxisLabel> entries_;
  std::size_t max_len_ = 0;
};

// Externally produced spans, keyed by term. Terms not in the file fall back
// to `fallback` when given, otherwise they get no spans.
class PretaggedTagger : public Tagger {
 public:
  PretaggedTagger(std::vector<TaggedTerm> tagged,
                  std::shared_ptr<const Tagger> fallback = nullptr);
  TaggedTerm tag(const TermText& term) const override;
  std::size_t size() const { return tagged_.size(); }

 private:
  std::unordered_map<std::string, TaggedTerm> tagged_;
  std::shared_ptr<const Tagger> fallback_;
};

// JSONL: {"term": "...", "spans": [{"start": 0, "end": 3, "label": "region"}]}
// Labels accept the long names or the BIO tags.
std::vector<TaggedTerm> read_pretagged(std::istream& in,
                                       const std::string& source = "");
std::vector<TaggedTerm> load_pretagged(const std::string& path);

TaggedTerm tag(const TermText& term, const AxisLexicons& lexicons);

// One label per code point: B-<TAG>, I-<TAG> or O.
std::vector<std::string> spans_to_bio(const TaggedTerm& tagged);

// Inverse of spans_to_bio. An I- tag that does not continue a span of the
// same label opens a new one. Throws std::invalid_argument on unknown tags.
std::vector<AxisSpan> bio_to_spans(const std::vector<std::string>& bio);

// Substring under the leftmost span with this label.
std::optional<std::string> axis_value(const TaggedTerm& tagged,
                                      AxisLabel label);

// Leftmost span with this label.
std::optional<AxisSpan> axis_span(const TaggedTerm& tagged, AxisLabel label);

}  // namespace dxaug
