#include "dxaug/filter.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>

#include "dxaug/augment.hpp"
#include "dxaug/errors.hpp"
#include "dxaug/parallel.hpp"

namespace dxaug {

NgmMode parse_ngm_mode(std::string_view name) {
  if (name == "multiset") return NgmMode::Multiset;
  if (name == "distinct-set") return NgmMode::DistinctSet;
  throw std::invalid_argument("unknown ngm mode: " + std::string(name));
}

NGramProfile::NGramProfile(const TermText& term) {
  const std::u32string& cps = term.codepoints();
  const std::size_t len = cps.size();
  levels_.resize(len);
  for (std::size_t n = 1; n <= len; ++n) {
    std::vector<std::u32string> grams;
    grams.reserve(len - n + 1);
    for (std::size_t i = 0; i + n <= len; ++i) grams.push_back(cps.substr(i, n));
    std::sort(grams.begin(), grams.end());
    auto& level = levels_[n - 1];
    for (auto& g : grams) {
      if (!level.empty() && level.back().first == g) {
        ++level.back().second;
      } else {
        level.emplace_back(std::move(g), 1);
      }
    }
  }
}

double ngm_score(const NGramProfile& u, const NGramProfile& s, NgmMode mode) {
  const std::size_t m = std::min(u.length(), s.length());
  if (m == 0) throw std::invalid_argument("ngm_score: empty term");
  std::size_t matched = 0;
  for (std::size_t n = 1; n <= m; ++n) {
    const auto& a = u.level(n);
    const auto& b = s.level(n);
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
      if (ia->first < ib->first) {
        ++ia;
      } else if (ib->first < ia->first) {
        ++ib;
      } else {
        matched += mode == NgmMode::Multiset
                       ? static_cast<std::size_t>(std::min(ia->second, ib->second))
                       : 1;
        ++ia;
        ++ib;
      }
    }
  }
  return static_cast<double>(matched) / static_cast<double>(m);
}

double ngm_score(const TermText& u, const TermText& s, NgmMode mode) {
  return ngm_score(NGramProfile(u), NGramProfile(s), mode);
}

// ---------------------------------------------------------------------------

HashedNgramEmbedder::HashedNgramEmbedder(std::size_t dimension)
    : dimension_(dimension) {
  if (dimension_ == 0) throw std::invalid_argument("dimension must be > 0");
}

std::vector<double> HashedNgramEmbedder::embed(const TermText& term) const {
  std::vector<double> v(dimension_, 0.0);
  const std::u32string& cps = term.codepoints();
  for (std::size_t n = 1; n <= 2; ++n) {
    for (std::size_t i = 0; i + n <= cps.size(); ++i) {
      std::string gram = u32_to_utf8(std::u32string_view(cps).substr(i, n));
      v[fnv1a64(gram) % dimension_] += 1.0;
    }
  }
  return v;
}

VectorFileEmbedder VectorFileEmbedder::read(std::istream& in,
                                            const std::string& source) {
  VectorFileEmbedder out;
  for (auto& [lineno, line] : read_record_lines(in)) {
    auto fields = split(line, "\t");
    if (fields.size() != 2) {
      throw InputError(source, lineno, "expected term<TAB>v1,v2,...");
    }
    std::string term;
    try {
      term = TermText(fields[0]).raw();
    } catch (const std::invalid_argument& e) {
      throw InputError(source, lineno, e.what());
    }
    std::vector<double> vec;
    for (const std::string& f : split(fields[1], ",")) {
      std::string_view tok = f;
      while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
      while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
      double x = 0.0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), x);
      if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(x)) {
        throw InputError(source, lineno, "bad vector component '" + f + "'");
      }
      vec.push_back(x);
    }
    if (out.dimension_ == 0) {
      out.dimension_ = vec.size();
    } else if (vec.size() != out.dimension_) {
      throw InputError(source, lineno,
                       "dimension " + std::to_string(vec.size()) +
                           " differs from " + std::to_string(out.dimension_));
    }
    if (!out.vectors_.emplace(term, std::move(vec)).second) {
      throw InputError(source, lineno, "duplicate term '" + term + "'");
    }
  }
  return out;
}

VectorFileEmbedder VectorFileEmbedder::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path, 0, "cannot open file");
  return read(in, path);
}

std::vector<double> VectorFileEmbedder::embed(const TermText& term) const {
  auto it = vectors_.find(term.raw());
  if (it == vectors_.end()) {
    throw EmbeddingUnavailable("no vector for '" + term.raw() + "'");
  }
  return it->second;
}

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dimension mismatch");
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw std::invalid_argument("zero vector");
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

// ---------------------------------------------------------------------------

void FilterConfig::validate() const {
  if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be >= 0");
  if (!(beta >= -1.0 && beta <= 1.0)) {
    throw std::invalid_argument("beta must lie in [-1, 1]");
  }
  if (!embedder) throw std::invalid_argument("no embedding provider");
}

std::size_t FilterResult::dropped_total() const {
  std::size_t n = 0;
  for (const auto& [reason, count] : dropped_by_reason) n += count;
  return n;
}

FilterScores score_pair(const TermText& u, const TermText& s,
                        const FilterConfig& cfg) {
  FilterScores sc;
  sc.ngm = ngm_score(u, s, cfg.ngm_mode);
  sc.cos = cosine(cfg.embedder->embed(u), cfg.embedder->embed(s));
  return sc;
}

FilterResult filter_pairs(const std::vector<NormPair>& pairs,
                          const FilterConfig& cfg) {
  cfg.validate();
  struct Verdict {
    std::optional<FilterScores> scores;
    const char* reason = nullptr;
  };
  std::vector<Verdict> verdicts(pairs.size());

  parallel_for(pairs.size(), cfg.workers, [&](std::size_t i) {
    const NormPair& p = pairs[i];
    if (p.provenance == Provenance::Original) return;
    Verdict& v = verdicts[i];
    FilterScores sc;
    sc.ngm = ngm_score(p.unnormalized, p.standard, cfg.ngm_mode);
    if (!(sc.ngm > cfg.alpha)) {
      v.reason = kDropNgm;
      return;
    }
    try {
      sc.cos = cosine(cfg.embedder->embed(p.unnormalized),
                      cfg.embedder->embed(p.standard));
    } catch (const EmbeddingUnavailable&) {
      v.reason = kDropEmbedding;
      return;
    } catch (const std::invalid_argument&) {
      v.reason = kDropEmbedding;
      return;
    }
    if (!(sc.cos > cfg.beta)) {
      v.reason = kDropCos;
      return;
    }
    v.scores = sc;
  });

  FilterResult out;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const Verdict& v = verdicts[i];
    if (v.reason != nullptr) {
      ++out.dropped_by_reason[v.reason];
      ++out.dropped_by_provenance[pairs[i].provenance][v.reason];
      continue;
    }
    NormPair kept = pairs[i];
    if (kept.provenance != Provenance::Original) kept.scores = v.scores;
    out.kept.push_back(std::move(kept));
  }
  return out;
}

}  // namespace dxaug
