#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dxaug/filter.hpp"
#include "dxaug/vocab.hpp"

namespace dxaug {

struct Ranked {
  std::string standard;
  double score = 0.0;
};

/// Retrieval normalizer over a fixed label space.
///
/// Every standard name is a surface form of itself; each pair adds its
/// unnormalized side as a surface form of its standard. A query scores each
/// standard by the best ngm over that standard's surface forms.
class SynonymIndex {
 public:
  explicit SynonymIndex(const std::vector<NormPair>& pairs,
                        const std::vector<TermText>& extra_labels = {},
                        NgmMode mode = NgmMode::Multiset);

  std::size_t label_count() const { return labels_.size(); }
  std::size_t surface_count() const { return surfaces_.size(); }
  bool empty() const { return labels_.empty(); }
  const std::vector<std::string>& labels() const { return labels_; }

  // Descending score, ties by standard name; at most k results.
  std::vector<Ranked> rank(const TermText& query, std::size_t k) const;

 private:
  struct Surface {
    NGramProfile profile;
    std::vector<std::size_t> labels;
  };
  std::vector<std::string> labels_;  // sorted
  std::vector<Surface> surfaces_;
  std::unordered_map<char32_t, std::vector<std::size_t>> by_char_;
  NgmMode mode_;
};

using GoldSet = std::set<std::string>;
using Ranking = std::vector<std::string>;

std::vector<std::string> names(const std::vector<Ranked>& ranked);

double accuracy(const std::vector<GoldSet>& gold,
                const std::vector<Ranking>& ranked);
double f1_set(const std::vector<GoldSet>& gold,
              const std::vector<std::set<std::string>>& predicted);
double recall_at_k(const std::vector<GoldSet>& gold,
                   const std::vector<Ranking>& ranked, std::size_t k = 5);
double ndcg_at_k(const std::vector<GoldSet>& gold,
                 const std::vector<Ranking>& ranked, std::size_t k = 5);

struct EvalQuery {
  TermText query;
  GoldSet gold;
};

// Groups pairs by unnormalized name; queries come out sorted.
std::vector<EvalQuery> group_queries(const std::vector<NormPair>& pairs);

struct EvalReport {
  double accuracy = 0.0;
  double f1 = 0.0;
  double recall_at_k = 0.0;
  double ndcg_at_k = 0.0;
  std::size_t n_queries = 0;
  std::size_t k = 5;
};

struct EvalOptions {
  std::size_t k = 5;
  // When set, the F1 prediction set is every top-k result scoring at least
  // this much; otherwise it is the rank-1 result alone.
  std::optional<double> f1_threshold;
  std::size_t workers = 1;
};

EvalReport evaluate(const SynonymIndex& index,
                    const std::vector<EvalQuery>& queries,
                    const EvalOptions& opts = {});

// Seeded permutation prefix of the distinct training pairs: the sample for a
// smaller fraction is always contained in the sample for a larger one.
std::vector<NormPair> nested_sample(const std::vector<NormPair>& pairs,
                                    double fraction, std::uint64_t seed);

struct SubsampleSetup {
  std::vector<NormPair> train;      // Original pairs
  std::vector<NormPair> augmented;  // generated pairs
  std::vector<EvalQuery> valid;
  std::vector<TermText> extra_labels;
  EvalOptions eval;
};

// One report per fraction. Fraction 0 is allowed only with augmentation and
// means an index built from the augmented pairs alone (zero-shot analog).
std::vector<std::pair<double, EvalReport>> subsample_experiment(
    const SubsampleSetup& setup, const std::vector<double>& fractions,
    std::uint64_t seed, bool with_augmentation);

}  // namespace dxaug
