#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dxaug/text.hpp"
#include "dxaug/vocab.hpp"

namespace dxaug {

// How matched n-grams are counted at each n: multiset intersection size
// (sum of min occurrence counts) or number of distinct shared n-grams.
enum class NgmMode { Multiset, DistinctSet };

NgmMode parse_ngm_mode(std::string_view name);  // "multiset" | "distinct-set"

/// All contiguous code-point n-grams of a term for n = 1..length, with
/// occurrence counts. Level n holds length - n + 1 occurrences in total.
class NGramProfile {
 public:
  explicit NGramProfile(const TermText& term);

  std::size_t length() const { return levels_.size(); }
  // Sorted (gram, count) pairs for n-grams of length n, 1 <= n <= length().
  const std::vector<std::pair<std::u32string, int>>& level(std::size_t n) const {
    return levels_.at(n - 1);
  }

 private:
  std::vector<std::vector<std::pair<std::u32string, int>>> levels_;
};

// Sum over n = 1..m of matched n-grams, divided by m = min(len(u), len(s)).
// Not bounded by 1: ngm(t, t) = (len(t) + 1) / 2.
double ngm_score(const NGramProfile& u, const NGramProfile& s,
                 NgmMode mode = NgmMode::Multiset);
double ngm_score(const TermText& u, const TermText& s,
                 NgmMode mode = NgmMode::Multiset);

// Raised when a provider has no vector for a term.
class EmbeddingUnavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::string name() const = 0;
  virtual std::size_t dimension() const = 0;
  // Deterministic; exactly dimension() components.
  virtual std::vector<double> embed(const TermText& term) const = 0;
};

/// Bag of hashed character unigrams and bigrams.
///
/// Each unigram and each bigram of the term adds 1 to bucket
/// fnv1a64(utf8(gram)) % dimension, using 64-bit FNV-1a over the UTF-8
/// bytes. Components therefore sum to 2 * length - 1.
class HashedNgramEmbedder : public EmbeddingProvider {
 public:
  explicit HashedNgramEmbedder(std::size_t dimension = 256);
  std::string name() const override { return "hashed-bigram"; }
  std::size_t dimension() const override { return dimension_; }
  std::vector<double> embed(const TermText& term) const override;

 private:
  std::size_t dimension_;
};

// Precomputed vectors from `term<TAB>v1,v2,...` lines. Unknown terms raise
// EmbeddingUnavailable.
class VectorFileEmbedder : public EmbeddingProvider {
 public:
  static VectorFileEmbedder read(std::istream& in, const std::string& source);
  static VectorFileEmbedder load(const std::string& path);

  std::string name() const override { return "vector-file"; }
  std::size_t dimension() const override { return dimension_; }
  std::vector<double> embed(const TermText& term) const override;
  std::size_t size() const { return vectors_.size(); }

 private:
  std::size_t dimension_ = 0;
  std::unordered_map<std::string, std::vector<double>> vectors_;
};

// Throws std::invalid_argument on dimension mismatch or a zero vector.
// Result is clamped to [-1, 1].
double cosine(std::span<const double> a, std::span<const double> b);

struct FilterConfig {
  double alpha = 0.7;
  double beta = 0.8;
  NgmMode ngm_mode = NgmMode::Multiset;
  std::shared_ptr<const EmbeddingProvider> embedder =
      std::make_shared<HashedNgramEmbedder>();
  std::size_t workers = 1;

  void validate() const;  // alpha >= 0, -1 <= beta <= 1, embedder set
};

inline constexpr const char* kDropNgm = "ngm_not_above_alpha";
inline constexpr const char* kDropCos = "cos_not_above_beta";
inline constexpr const char* kDropEmbedding = "embedding_unavailable";

struct FilterResult {
  std::vector<NormPair> kept;  // input order, generated pairs carry scores
  std::map<std::string, std::size_t> dropped_by_reason;
  std::map<Provenance, std::map<std::string, std::size_t>>
      dropped_by_provenance;

  std::size_t dropped_total() const;
};

// Keeps generated pairs with ngm > alpha and cos > beta. Original pairs pass
// through untouched. Each dropped pair is counted under the first failing
// test in the order ngm, embedding, cos.
FilterResult filter_pairs(const std::vector<NormPair>& pairs,
                          const FilterConfig& cfg);

// Both scores for one pair; throws EmbeddingUnavailable or
// std::invalid_argument from the provider/cosine.
FilterScores score_pair(const TermText& u, const TermText& s,
                        const FilterConfig& cfg);

}  // namespace dxaug
