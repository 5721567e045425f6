#include "dxaug/augment.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

#include "dxaug/parallel.hpp"

namespace dxaug {

void AugConfig::validate() const {
  if (max_pairs_per_source < 1) {
    throw std::invalid_argument("max_pairs_per_source must be >= 1");
  }
  for (Provenance p : enabled_methods) {
    if (p == Provenance::Original) {
      throw std::invalid_argument("'original' is not an augmentation method");
    }
  }
}

AxisProfile profile_of(const TaggedTerm& tagged) {
  AxisProfile p;
  for (AxisLabel l : kAllAxes) p[static_cast<std::size_t>(l)] = axis_value(tagged, l);
  return p;
}

void TaggedIndex::add(TaggedTerm tagged) {
  std::string key = tagged.term.raw();
  if (terms_.count(key) != 0) return;
  AxisProfile prof = profile_of(tagged);
  for (AxisLabel l : kAllAxes) {
    const auto& v = prof[static_cast<std::size_t>(l)];
    if (v) inverted_[{l, *v}].insert(key);
  }
  terms_.emplace(std::move(key), Slot{std::move(tagged), std::move(prof)});
}

const TaggedTerm* TaggedIndex::find(std::string_view term) const {
  auto it = terms_.find(std::string(term));
  return it == terms_.end() ? nullptr : &it->second.tagged;
}

const AxisProfile* TaggedIndex::profile(std::string_view term) const {
  auto it = terms_.find(std::string(term));
  return it == terms_.end() ? nullptr : &it->second.profile;
}

const std::set<std::string>& TaggedIndex::terms_with(
    AxisLabel label, std::string_view value) const {
  static const std::set<std::string> kEmpty;
  auto it = inverted_.find({label, std::string(value)});
  return it == inverted_.end() ? kEmpty : it->second;
}

TaggedIndex build_index(const IcdVocabulary& vocab,
                        const std::vector<NormPair>& task_pairs,
                        const Tagger& tagger, std::size_t workers) {
  std::vector<const TermText*> terms;
  for (const IcdEntry& e : vocab.entries()) terms.push_back(&e.name);
  for (const NormPair& p : task_pairs) {
    terms.push_back(&p.unnormalized);
    terms.push_back(&p.standard);
  }
  std::vector<std::optional<TaggedTerm>> tagged(terms.size());
  parallel_for(terms.size(), workers,
               [&](std::size_t i) { tagged[i] = tagger.tag(*terms[i]); });
  TaggedIndex idx;
  for (auto& t : tagged) idx.add(std::move(*t));
  return idx;
}

TermText replace_span(const TermText& term, const AxisSpan& span,
                      std::string_view replacement) {
  if (span.start >= span.end || span.end > term.length()) {
    throw std::out_of_range("invalid span bounds");
  }
  if (replacement.empty()) throw std::invalid_argument("empty replacement");
  return TermText(term.substr(0, span.start) + std::string(replacement) +
                  term.substr(span.end, term.length()));
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<NormPair> sample_pairs(std::vector<NormPair> pairs, std::size_t k,
                                   std::uint64_t seed, std::string_view key) {
  if (pairs.size() <= k) return pairs;
  std::uint64_t h = fnv1a64(key);
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(h),
                    static_cast<std::uint32_t>(h >> 32)};
  std::mt19937_64 rng(seq);
  // Partial Fisher-Yates over indices; rejection sampling keeps the draw
  // uniform and independent of the standard library's distributions.
  std::vector<std::size_t> order(pairs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (std::size_t i = 0; i < k; ++i) {
    const std::uint64_t range = order.size() - i;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
    std::uint64_t r;
    do {
      r = rng();
    } while (r >= limit);
    std::swap(order[i], order[i + r % range]);
  }
  order.resize(k);
  std::sort(order.begin(), order.end());
  std::vector<NormPair> out;
  out.reserve(k);
  for (std::size_t i : order) out.push_back(std::move(pairs[i]));
  return out;
}

namespace {

constexpr std::size_t slot(AxisLabel l) { return static_cast<std::size_t>(l); }

const AxisProfile& profile_or_empty(const TaggedIndex& idx,
                                    std::string_view term) {
  static const AxisProfile kEmpty{};
  const AxisProfile* p = idx.profile(term);
  return p ? *p : kEmpty;
}

bool shares_other_axis(const AxisProfile& a, const AxisProfile& b,
                       AxisLabel except) {
  for (AxisLabel l : kAllAxes) {
    if (l == except) continue;
    if (a[slot(l)] && b[slot(l)] && *a[slot(l)] == *b[slot(l)]) return true;
  }
  return false;
}

// Vocabulary entries (by index) sharing at least one leftmost axis value
// with `prof`, in code order.
std::vector<std::size_t> related_entries(
    const TaggedIndex& idx,
    const std::unordered_map<std::string, std::vector<std::size_t>>& by_name,
    const AxisProfile& prof) {
  std::set<std::size_t> out;
  for (AxisLabel l : kAllAxes) {
    if (!prof[slot(l)]) continue;
    for (const std::string& term : idx.terms_with(l, *prof[slot(l)])) {
      auto it = by_name.find(term);
      if (it == by_name.end()) continue;
      out.insert(it->second.begin(), it->second.end());
    }
  }
  return {out.begin(), out.end()};
}

std::unordered_map<std::string, std::vector<std::size_t>> names_to_entries(
    const IcdVocabulary& vocab) {
  std::unordered_map<std::string, std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < vocab.entries().size(); ++i) {
    out[vocab.entries()[i].name.raw()].push_back(i);
  }
  return out;
}

std::vector<NormPair> finish_source(std::vector<NormPair> cands,
                                    const AugConfig& cfg,
                                    std::string_view key) {
  std::sort(cands.begin(), cands.end(), canonical_less);
  cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
  return sample_pairs(std::move(cands), cfg.max_pairs_per_source, cfg.rng_seed,
                      key);
}

std::vector<NormPair> flatten_sorted(std::vector<std::vector<NormPair>> parts) {
  std::vector<NormPair> out;
  for (auto& p : parts) {
    std::move(p.begin(), p.end(), std::back_inserter(out));
  }
  std::sort(out.begin(), out.end(), canonical_less);
  return out;
}

}  // namespace

std::vector<NormPair> ar1(const IcdVocabulary& vocab, const TaggedIndex& idx,
                          const AugConfig& cfg) {
  cfg.validate();
  const auto& entries = vocab.entries();
  const auto by_name = names_to_entries(vocab);
  std::vector<std::vector<NormPair>> per_source(entries.size());

  parallel_for(entries.size(), cfg.workers, [&](std::size_t ai) {
    const IcdEntry& a = entries[ai];
    const TaggedTerm* ta = idx.find(a.name.raw());
    if (ta == nullptr) return;
    const AxisProfile& pa = profile_or_empty(idx, a.name.raw());
    std::vector<NormPair> cands;
    for (std::size_t bi : related_entries(idx, by_name, pa)) {
      const IcdEntry& b = entries[bi];
      if (b.name == a.name) continue;
      const AxisProfile& pb = profile_or_empty(idx, b.name.raw());
      for (AxisLabel axis2 : cfg.axes_for_replacement) {
        const auto& va = pa[slot(axis2)];
        const auto& vb = pb[slot(axis2)];
        if (!va || !vb || *va == *vb) continue;
        if (!shares_other_axis(pa, pb, axis2)) continue;
        TermText made = replace_span(a.name, *axis_span(*ta, axis2), *vb);
        if (made == b.name) continue;
        // A name that is already a different vocabulary concept would be
        // mislabelled.
        bool clash = false;
        for (const std::string& code : vocab.codes_for_name(made.raw())) {
          if (code != b.code) clash = true;
        }
        if (clash) continue;
        cands.push_back(NormPair{std::move(made), b.name, b.code,
                                 Provenance::AR1, std::nullopt});
      }
    }
    per_source[ai] = finish_source(std::move(cands), cfg, "ar1\t" + a.code);
  });
  return flatten_sorted(std::move(per_source));
}

std::vector<NormPair> ar2(const std::vector<NormPair>& task_pairs,
                          const IcdVocabulary& vocab, const TaggedIndex& idx,
                          const AugConfig& cfg) {
  cfg.validate();
  const auto& entries = vocab.entries();
  const auto by_name = names_to_entries(vocab);

  // One source per distinct (U, S).
  std::vector<std::pair<TermText, TermText>> sources;
  {
    std::set<std::pair<std::string, std::string>> seen;
    for (const NormPair& p : task_pairs) {
      if (p.provenance != Provenance::Original) continue;
      if (seen.emplace(p.unnormalized.raw(), p.standard.raw()).second) {
        sources.emplace_back(p.unnormalized, p.standard);
      }
    }
  }
  std::vector<std::vector<NormPair>> per_source(sources.size());

  parallel_for(sources.size(), cfg.workers, [&](std::size_t si) {
    const auto& [u, s] = sources[si];
    const AxisProfile& ps = profile_or_empty(idx, s.raw());
    std::vector<NormPair> cands;
    for (std::size_t ci : related_entries(idx, by_name, ps)) {
      const IcdEntry& c = entries[ci];
      if (c.name == s) continue;
      const AxisProfile& pc = profile_or_empty(idx, c.name.raw());
      for (AxisLabel axis2 : cfg.axes_for_replacement) {
        const auto& vs = ps[slot(axis2)];
        const auto& vc = pc[slot(axis2)];
        if (!vs || !vc || *vs == *vc) continue;
        if (!shares_other_axis(ps, pc, axis2)) continue;
        std::u32string needle = utf8_to_u32(*vs);
        std::size_t pos = u.codepoints().find(needle);
        if (pos == std::u32string::npos) continue;
        TermText made =
            replace_span(u, AxisSpan{pos, pos + needle.size(), axis2}, *vc);
        if (made == c.name) continue;
        cands.push_back(NormPair{std::move(made), c.name, c.code,
                                 Provenance::AR2, std::nullopt});
      }
    }
    per_source[si] = finish_source(std::move(cands), cfg,
                                   "ar2\t" + u.raw() + "\t" + s.raw());
  });
  return flatten_sorted(std::move(per_source));
}

std::vector<NormPair> mga_code(const IcdVocabulary& vocab) {
  std::vector<NormPair> out;
  for (const IcdEntry& p : vocab.entries()) {
    if (p.granularity != Granularity::FourDigit) continue;
    for (const IcdEntry& c : children_of(vocab, p.code)) {
      if (c.name == p.name) continue;
      out.push_back(
          NormPair{p.name, c.name, c.code, Provenance::MgaCode, std::nullopt});
    }
  }
  std::sort(out.begin(), out.end(), canonical_less);
  return out;
}

std::vector<NormPair> mga_region(const IcdVocabulary& vocab,
                                 const TaggedIndex& idx,
                                 const RegionTree& tree) {
  const auto& entries = vocab.entries();
  const auto by_name = names_to_entries(vocab);
  std::vector<NormPair> out;
  for (const IcdEntry& x : entries) {
    const AxisProfile& px = profile_or_empty(idx, x.name.raw());
    const auto& center = px[slot(AxisLabel::Center)];
    const auto& small = px[slot(AxisLabel::Region)];
    if (!center || !small) continue;
    for (const std::string& term : idx.terms_with(AxisLabel::Center, *center)) {
      auto it = by_name.find(term);
      if (it == by_name.end()) continue;
      const auto& big = profile_or_empty(idx, term)[slot(AxisLabel::Region)];
      if (!big || !is_ancestor_region(tree, *big, *small)) continue;
      for (std::size_t yi : it->second) {
        const IcdEntry& y = entries[yi];
        if (y.name == x.name) continue;
        out.push_back(
            NormPair{y.name, x.name, x.code, Provenance::MgaRegion, std::nullopt});
      }
    }
  }
  std::sort(out.begin(), out.end(), canonical_less);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace dxaug
