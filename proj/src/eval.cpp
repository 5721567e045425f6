#include "dxaug/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

#include "dxaug/parallel.hpp"

namespace dxaug {

SynonymIndex::SynonymIndex(const std::vector<NormPair>& pairs,
                           const std::vector<TermText>& extra_labels,
                           NgmMode mode)
    : mode_(mode) {
  // surface -> labels, both ordered so construction is order-independent.
  std::map<std::string, std::set<std::string>> forms;
  std::map<std::string, const TermText*> texts;
  auto add = [&](const TermText& surface, const TermText& label) {
    forms[surface.raw()].insert(label.raw());
    texts.emplace(surface.raw(), &surface);
  };
  for (const TermText& l : extra_labels) add(l, l);
  for (const NormPair& p : pairs) {
    add(p.standard, p.standard);
    add(p.unnormalized, p.standard);
  }
  std::set<std::string> label_set;
  for (const auto& [surface, ls] : forms) label_set.insert(ls.begin(), ls.end());
  labels_.assign(label_set.begin(), label_set.end());

  for (const auto& [surface, ls] : forms) {
    const TermText& text = *texts.at(surface);
    Surface s{NGramProfile(text), {}};
    for (const std::string& l : ls) {
      s.labels.push_back(static_cast<std::size_t>(
          std::lower_bound(labels_.begin(), labels_.end(), l) - labels_.begin()));
    }
    const std::size_t id = surfaces_.size();
    std::set<char32_t> chars(text.codepoints().begin(), text.codepoints().end());
    for (char32_t c : chars) by_char_[c].push_back(id);
    surfaces_.push_back(std::move(s));
  }
}

std::vector<Ranked> SynonymIndex::rank(const TermText& query,
                                       std::size_t k) const {
  if (labels_.empty()) throw std::invalid_argument("empty synonym index");
  if (k == 0) throw std::invalid_argument("k must be >= 1");

  // Surfaces sharing no character score exactly 0, so only those reachable
  // through the query's characters need scoring.
  std::set<std::size_t> candidates;
  for (char32_t c : query.codepoints()) {
    auto it = by_char_.find(c);
    if (it != by_char_.end()) candidates.insert(it->second.begin(), it->second.end());
  }
  const NGramProfile qp(query);
  std::unordered_map<std::size_t, double> best;
  for (std::size_t sid : candidates) {
    const Surface& s = surfaces_[sid];
    double sc = ngm_score(qp, s.profile, mode_);
    for (std::size_t l : s.labels) {
      auto [it, fresh] = best.emplace(l, sc);
      if (!fresh && sc > it->second) it->second = sc;
    }
  }
  std::vector<std::pair<std::size_t, double>> scored(best.begin(), best.end());
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });

  std::vector<Ranked> out;
  for (const auto& [l, sc] : scored) {
    if (out.size() == k) return out;
    out.push_back({labels_[l], sc});
  }
  // Labels ids are in lexicographic order, so zero-score fill is too.
  for (std::size_t l = 0; l < labels_.size() && out.size() < k; ++l) {
    if (best.count(l) == 0) out.push_back({labels_[l], 0.0});
  }
  return out;
}

std::vector<std::string> names(const std::vector<Ranked>& ranked) {
  std::vector<std::string> out;
  out.reserve(ranked.size());
  for (const Ranked& r : ranked) out.push_back(r.standard);
  return out;
}

namespace {

template <class A, class B>
void check_lengths(const A& a, const B& b) {
  if (a.size() != b.size()) throw std::invalid_argument("length mismatch");
  if (a.empty()) throw std::invalid_argument("no queries");
}

void check_gold(const GoldSet& g) {
  if (g.empty()) throw std::invalid_argument("empty gold set");
}

}  // namespace

double accuracy(const std::vector<GoldSet>& gold,
                const std::vector<Ranking>& ranked) {
  check_lengths(gold, ranked);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (!ranked[i].empty() && gold[i].count(ranked[i].front())) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(gold.size());
}

double f1_set(const std::vector<GoldSet>& gold,
              const std::vector<std::set<std::string>>& predicted) {
  if (gold.size() != predicted.size()) throw std::invalid_argument("length mismatch");
  std::size_t tp = 0, n_pred = 0, n_gold = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    n_pred += predicted[i].size();
    n_gold += gold[i].size();
    for (const std::string& p : predicted[i]) tp += gold[i].count(p);
  }
  if (n_pred == 0 || n_gold == 0 || tp == 0) return 0.0;
  double precision = static_cast<double>(tp) / static_cast<double>(n_pred);
  double recall = static_cast<double>(tp) / static_cast<double>(n_gold);
  return 2.0 * precision * recall / (precision + recall);
}

double recall_at_k(const std::vector<GoldSet>& gold,
                   const std::vector<Ranking>& ranked, std::size_t k) {
  check_lengths(gold, ranked);
  double total = 0.0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    check_gold(gold[i]);
    std::set<std::string> top(ranked[i].begin(),
                              ranked[i].begin() + static_cast<std::ptrdiff_t>(
                                                      std::min(k, ranked[i].size())));
    std::size_t hit = 0;
    for (const std::string& g : gold[i]) hit += top.count(g);
    total += static_cast<double>(hit) / static_cast<double>(gold[i].size());
  }
  return total / static_cast<double>(gold.size());
}

double ndcg_at_k(const std::vector<GoldSet>& gold,
                 const std::vector<Ranking>& ranked, std::size_t k) {
  check_lengths(gold, ranked);
  double total = 0.0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    check_gold(gold[i]);
    double dcg = 0.0;
    std::set<std::string> seen;
    for (std::size_t r = 0; r < std::min(k, ranked[i].size()); ++r) {
      const std::string& name = ranked[i][r];
      if (gold[i].count(name) && seen.insert(name).second) {
        dcg += 1.0 / std::log2(static_cast<double>(r) + 2.0);
      }
    }
    double idcg = 0.0;
    for (std::size_t r = 0; r < std::min(k, gold[i].size()); ++r) {
      idcg += 1.0 / std::log2(static_cast<double>(r) + 2.0);
    }
    total += dcg / idcg;
  }
  return total / static_cast<double>(gold.size());
}

std::vector<EvalQuery> group_queries(const std::vector<NormPair>& pairs) {
  std::map<std::string, std::pair<const TermText*, GoldSet>> grouped;
  for (const NormPair& p : pairs) {
    auto& slot = grouped[p.unnormalized.raw()];
    slot.first = &p.unnormalized;
    slot.second.insert(p.standard.raw());
  }
  std::vector<EvalQuery> out;
  for (auto& [key, v] : grouped) out.push_back({*v.first, std::move(v.second)});
  return out;
}

EvalReport evaluate(const SynonymIndex& index,
                    const std::vector<EvalQuery>& queries,
                    const EvalOptions& opts) {
  std::vector<std::vector<Ranked>> ranked(queries.size());
  parallel_for(queries.size(), opts.workers, [&](std::size_t i) {
    ranked[i] = index.rank(queries[i].query, opts.k);
  });
  std::vector<GoldSet> gold;
  std::vector<Ranking> lists;
  std::vector<std::set<std::string>> predicted;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    gold.push_back(queries[i].gold);
    lists.push_back(names(ranked[i]));
    std::set<std::string> pred;
    if (opts.f1_threshold) {
      for (const Ranked& r : ranked[i]) {
        if (r.score >= *opts.f1_threshold) pred.insert(r.standard);
      }
    } else if (!ranked[i].empty()) {
      pred.insert(ranked[i].front().standard);
    }
    predicted.push_back(std::move(pred));
  }
  EvalReport rep;
  rep.k = opts.k;
  rep.n_queries = queries.size();
  rep.accuracy = accuracy(gold, lists);
  rep.f1 = f1_set(gold, predicted);
  rep.recall_at_k = recall_at_k(gold, lists, opts.k);
  rep.ndcg_at_k = ndcg_at_k(gold, lists, opts.k);
  return rep;
}

std::vector<NormPair> nested_sample(const std::vector<NormPair>& pairs,
                                    double fraction, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw std::invalid_argument("fraction must lie in [0, 1]");
  }
  std::vector<NormPair> pool = pairs;
  std::sort(pool.begin(), pool.end(), canonical_less);
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());

  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32)};
  std::mt19937_64 rng(seq);
  for (std::size_t i = pool.size(); i > 1; --i) {
    const std::uint64_t range = i;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
    std::uint64_t r;
    do {
      r = rng();
    } while (r >= limit);
    std::swap(pool[i - 1], pool[r % range]);
  }
  auto n = static_cast<std::size_t>(
      std::floor(fraction * static_cast<double>(pool.size()) + 1e-9));
  pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(std::min(n, pool.size())),
             pool.end());
  return pool;
}

std::vector<std::pair<double, EvalReport>> subsample_experiment(
    const SubsampleSetup& setup, const std::vector<double>& fractions,
    std::uint64_t seed, bool with_augmentation) {
  std::vector<std::pair<double, EvalReport>> out;
  for (double f : fractions) {
    if (!(f >= 0.0 && f <= 1.0)) {
      throw std::invalid_argument("fraction must lie in [0, 1]");
    }
    std::vector<NormPair> index_pairs;
    if (f > 0.0) {
      index_pairs = nested_sample(setup.train, f, seed);
      if (index_pairs.empty()) {
        throw std::invalid_argument("fraction " + std::to_string(f) +
                                    " yields zero training pairs");
      }
    } else if (!with_augmentation) {
      throw std::invalid_argument("fraction 0 requires augmentation");
    }
    if (with_augmentation) {
      index_pairs.insert(index_pairs.end(), setup.augmented.begin(),
                         setup.augmented.end());
    }
    SynonymIndex index(index_pairs, setup.extra_labels);
    out.emplace_back(f, evaluate(index, setup.valid, setup.eval));
  }
  return out;
}

}  // namespace dxaug
