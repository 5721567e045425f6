#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dxaug/tagger.hpp"
#include "dxaug/vocab.hpp"

namespace dxaug {

inline const std::set<Provenance> kAllMethods = {
    Provenance::AR1, Provenance::AR2, Provenance::MgaCode,
    Provenance::MgaRegion};

struct AugConfig {
  std::set<Provenance> enabled_methods = kAllMethods;
  std::set<AxisLabel> axes_for_replacement = {
      AxisLabel::Center, AxisLabel::Region, AxisLabel::Characteristic};
  std::size_t max_pairs_per_source = 20;
  std::uint64_t rng_seed = 0;
  std::size_t workers = 1;

  void validate() const;
};

// Leftmost value per axis label, indexed by AxisLabel.
using AxisProfile = std::array<std::optional<std::string>, 3>;

AxisProfile profile_of(const TaggedTerm& tagged);

/// Tagged terms plus an inverted index from (label, leftmost axis value)
/// to the terms carrying it.
class TaggedIndex {
 public:
  void add(TaggedTerm tagged);

  const TaggedTerm* find(std::string_view term) const;
  const AxisProfile* profile(std::string_view term) const;
  const std::set<std::string>& terms_with(AxisLabel label,
                                          std::string_view value) const;
  std::size_t size() const { return terms_.size(); }

 private:
  struct Slot {
    TaggedTerm tagged;
    AxisProfile profile;
  };
  std::unordered_map<std::string, Slot> terms_;
  std::map<std::pair<AxisLabel, std::string>, std::set<std::string>> inverted_;
};

// Tags every vocabulary name and both sides of every task pair.
TaggedIndex build_index(const IcdVocabulary& vocab,
                        const std::vector<NormPair>& task_pairs,
                        const Tagger& tagger, std::size_t workers = 1);

// Substitutes code points [span.start, span.end) of term.
TermText replace_span(const TermText& term, const AxisSpan& span,
                      std::string_view replacement);

// Each generator returns its pairs in canonical order.

// For ordered vocabulary pairs (A, B) sharing one axis value and differing
// in another (axis2): (A with its axis2 replaced by B's, B).
std::vector<NormPair> ar1(const IcdVocabulary& vocab, const TaggedIndex& idx,
                          const AugConfig& cfg);

// For task pairs (U, S) and vocabulary names C sharing one axis value with S
// and differing in axis2: (U with S's axis2 replaced by C's, C). The
// replacement site is the leftmost occurrence of S's axis2 value in U.
std::vector<NormPair> ar2(const std::vector<NormPair>& task_pairs,
                          const IcdVocabulary& vocab, const TaggedIndex& idx,
                          const AugConfig& cfg);

// (FourDigit parent name, SixDigit child name) for every child.
std::vector<NormPair> mga_code(const IcdVocabulary& vocab);

// (Y, X) for names with equal centers where Y's region is a strict ancestor
// of X's region.
std::vector<NormPair> mga_region(const IcdVocabulary& vocab,
                                 const TaggedIndex& idx,
                                 const RegionTree& tree);

// Deterministic uniform sample of `k` items (order preserved), keyed by
// (seed, key). Returns the input when it already has at most k items.
std::vector<NormPair> sample_pairs(std::vector<NormPair> pairs, std::size_t k,
                                   std::uint64_t seed, std::string_view key);

std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace dxaug
