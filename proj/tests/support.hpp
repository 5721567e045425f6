// Helpers and brute-force reference implementations shared by the unit
// tests and the acceptance runner. Nothing here calls the code under test
// except to build inputs (TermText, IcdVocabulary, tagging).
#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "dxaug/tagger.hpp"
#include "dxaug/text.hpp"
#include "dxaug/vocab.hpp"

namespace testing {

namespace fs = std::filesystem;

inline std::string data_path(const std::string& rel) {
  return std::string(DXAUG_TEST_DATA) + "/" + rel;
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    for (;;) {
      path_ = fs::temp_directory_path() /
              ("dxaug-test-" + std::to_string(rd()) + std::to_string(rd()));
      if (fs::create_directory(path_)) break;
    }
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string str() const { return path_.string(); }
  std::string operator/(const std::string& name) const {
    return (path_ / name).string();
  }

 private:
  fs::path path_;
};

// ---------------------------------------------------------------------------
// ngm by materializing every substring.

inline double oracle_ngm(const std::u32string& u, const std::u32string& s,
                         bool distinct = false) {
  const std::size_t m = std::min(u.size(), s.size());
  std::size_t matched = 0;
  for (std::size_t n = 1; n <= m; ++n) {
    std::map<std::u32string, int> cu, cs;
    for (std::size_t i = 0; i + n <= u.size(); ++i) ++cu[u.substr(i, n)];
    for (std::size_t i = 0; i + n <= s.size(); ++i) ++cs[s.substr(i, n)];
    for (const auto& [g, c] : cu) {
      auto it = cs.find(g);
      if (it == cs.end()) continue;
      matched += distinct ? 1 : static_cast<std::size_t>(std::min(c, it->second));
    }
  }
  return static_cast<double>(matched) / static_cast<double>(m);
}

inline std::u32string random_cps(std::mt19937_64& rng,
                                 const std::u32string& alphabet,
                                 std::size_t min_len, std::size_t max_len) {
  std::uniform_int_distribution<std::size_t> len(min_len, max_len);
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::u32string out(len(rng), U' ');
  for (char32_t& c : out) c = alphabet[pick(rng)];
  return out;
}

inline std::string random_term(std::mt19937_64& rng,
                               const std::u32string& alphabet,
                               std::size_t min_len, std::size_t max_len) {
  return dxaug::u32_to_utf8(random_cps(rng, alphabet, min_len, max_len));
}

// A small pool of CJK characters, dense enough to produce shared n-grams.
inline const std::u32string kCjk =
    U"肺肝胃肾颈髂总动脉夹层恶性肿瘤囊结核炎急慢左右侧下肢淋巴";

// ---------------------------------------------------------------------------
// Generator rules, enumerated over all combinations.

using PairKey = std::tuple<std::string, std::string, std::string>;

struct Leftmost {
  std::optional<std::string> value[3];
  std::optional<std::pair<std::size_t, std::size_t>> span[3];
};

inline Leftmost leftmost(const dxaug::TaggedTerm& t) {
  Leftmost out;
  for (const dxaug::AxisSpan& sp : t.spans) {
    auto l = static_cast<std::size_t>(sp.label);
    if (out.span[l]) continue;
    out.span[l] = {sp.start, sp.end};
    out.value[l] = dxaug::u32_to_utf8(
        t.term.codepoints().substr(sp.start, sp.end - sp.start));
  }
  return out;
}

inline bool share_other(const Leftmost& a, const Leftmost& b, std::size_t axis2) {
  for (std::size_t l = 0; l < 3; ++l) {
    if (l != axis2 && a.value[l] && b.value[l] && *a.value[l] == *b.value[l]) {
      return true;
    }
  }
  return false;
}

inline std::string splice(const std::u32string& s, std::size_t start,
                          std::size_t end, const std::string& repl) {
  return dxaug::u32_to_utf8(s.substr(0, start)) + repl +
         dxaug::u32_to_utf8(s.substr(end));
}

inline std::set<PairKey> oracle_ar1(const dxaug::IcdVocabulary& vocab,
                                    const dxaug::AxisLexicons& lex) {
  std::set<PairKey> out;
  for (const auto& a : vocab.entries()) {
    Leftmost la = leftmost(dxaug::tag(a.name, lex));
    for (const auto& b : vocab.entries()) {
      if (a.name == b.name) continue;
      Leftmost lb = leftmost(dxaug::tag(b.name, lex));
      for (std::size_t ax = 0; ax < 3; ++ax) {
        if (!la.value[ax] || !lb.value[ax] || *la.value[ax] == *lb.value[ax]) continue;
        if (!share_other(la, lb, ax)) continue;
        std::string made = splice(a.name.codepoints(), la.span[ax]->first,
                                  la.span[ax]->second, *lb.value[ax]);
        if (made == b.name.raw()) continue;
        bool clash = false;
        for (const auto& e : vocab.entries()) {
          if (e.name.raw() == made && e.code != b.code) clash = true;
        }
        if (!clash) out.emplace(made, b.name.raw(), b.code);
      }
    }
  }
  return out;
}

inline std::set<PairKey> oracle_ar2(const std::vector<dxaug::NormPair>& tasks,
                                    const dxaug::IcdVocabulary& vocab,
                                    const dxaug::AxisLexicons& lex) {
  std::set<PairKey> out;
  for (const auto& p : tasks) {
    Leftmost ls = leftmost(dxaug::tag(p.standard, lex));
    const std::u32string& u = p.unnormalized.codepoints();
    for (const auto& c : vocab.entries()) {
      if (c.name == p.standard) continue;
      Leftmost lc = leftmost(dxaug::tag(c.name, lex));
      for (std::size_t ax = 0; ax < 3; ++ax) {
        if (!ls.value[ax] || !lc.value[ax] || *ls.value[ax] == *lc.value[ax]) continue;
        if (!share_other(ls, lc, ax)) continue;
        std::u32string needle = dxaug::utf8_to_u32(*ls.value[ax]);
        // First occurrence by scanning every offset.
        std::optional<std::size_t> at;
        for (std::size_t i = 0; i + needle.size() <= u.size() && !at; ++i) {
          if (std::equal(needle.begin(), needle.end(), u.begin() + i)) at = i;
        }
        if (!at) continue;
        std::string made = splice(u, *at, *at + needle.size(), *lc.value[ax]);
        if (made == c.name.raw()) continue;
        out.emplace(made, c.name.raw(), c.code);
      }
    }
  }
  return out;
}

inline std::set<PairKey> oracle_mga_code(const dxaug::IcdVocabulary& vocab) {
  std::set<PairKey> out;
  for (const auto& p : vocab.entries()) {
    if (p.granularity != dxaug::Granularity::FourDigit) continue;
    for (const auto& c : vocab.entries()) {
      if (c.granularity != dxaug::Granularity::SixDigit) continue;
      if (c.code.rfind(p.code, 0) != 0 || c.name == p.name) continue;
      out.emplace(p.name.raw(), c.name.raw(), c.code);
    }
  }
  return out;
}

inline bool oracle_strict_ancestor(
    const std::vector<std::pair<std::string, std::string>>& edges,
    const std::string& big, const std::string& small) {
  std::string cur = small;
  for (std::size_t steps = 0; steps <= edges.size(); ++steps) {
    auto it = std::find_if(edges.begin(), edges.end(),
                           [&](const auto& e) { return e.first == cur; });
    if (it == edges.end()) return false;
    cur = it->second;
    if (cur == big) return true;
  }
  return false;
}

inline std::set<PairKey> oracle_mga_region(
    const dxaug::IcdVocabulary& vocab, const dxaug::AxisLexicons& lex,
    const std::vector<std::pair<std::string, std::string>>& edges) {
  constexpr auto kC = static_cast<std::size_t>(dxaug::AxisLabel::Center);
  constexpr auto kR = static_cast<std::size_t>(dxaug::AxisLabel::Region);
  std::set<PairKey> out;
  for (const auto& y : vocab.entries()) {
    Leftmost ly = leftmost(dxaug::tag(y.name, lex));
    for (const auto& x : vocab.entries()) {
      if (x.name == y.name) continue;
      Leftmost lx = leftmost(dxaug::tag(x.name, lex));
      if (!ly.value[kC] || !lx.value[kC] || *ly.value[kC] != *lx.value[kC]) continue;
      if (!ly.value[kR] || !lx.value[kR]) continue;
      if (!oracle_strict_ancestor(edges, *ly.value[kR], *lx.value[kR])) continue;
      out.emplace(y.name.raw(), x.name.raw(), x.code);
    }
  }
  return out;
}

inline std::set<PairKey> keys(const std::vector<dxaug::NormPair>& pairs) {
  std::set<PairKey> out;
  for (const auto& p : pairs) {
    out.emplace(p.unnormalized.raw(), p.standard.raw(),
                p.standard_code.value_or(""));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Random miniature worlds for generator checks.

struct World {
  dxaug::AxisLexicons lex;
  std::vector<std::pair<std::string, std::string>> edges;  // child, parent
  dxaug::RegionTree tree;
  dxaug::IcdVocabulary vocab;
  std::vector<dxaug::NormPair> tasks;
};

inline World random_world(std::mt19937_64& rng, std::size_t max_entries = 30) {
  World w;
  w.lex.centers = {"囊肿", "结核", "癌", "恶性肿瘤", "肿瘤", "炎"};
  w.lex.regions = {"全身", "胸部", "肺", "肺上叶", "腹部", "肝", "胃", "颈", "颈总"};
  w.lex.characteristics = {"急性", "慢性", "结核性"};
  w.edges = {{"胸部", "全身"}, {"肺", "胸部"}, {"肺上叶", "肺"}, {"腹部", "全身"},
             {"肝", "腹部"},   {"胃", "腹部"}, {"颈", "全身"},   {"颈总", "颈"}};
  for (const auto& [c, p] : w.edges) w.tree.add_edge(c, p);

  const std::vector<std::string> regions(w.lex.regions.begin(), w.lex.regions.end());
  const std::vector<std::string> centers(w.lex.centers.begin(), w.lex.centers.end());
  const std::vector<std::string> chars(w.lex.characteristics.begin(),
                                       w.lex.characteristics.end());
  auto pick = [&](const std::vector<std::string>& v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
  };
  auto coin = [&](double p) { return std::bernoulli_distribution(p)(rng); };
  auto name = [&] {
    std::string n;
    if (coin(0.25)) n += pick(chars);
    n += pick(regions);
    if (coin(0.1)) n += "动脉";
    n += pick(centers);
    return n;
  };

  const std::size_t target =
      std::uniform_int_distribution<std::size_t>(5, max_entries)(rng);
  std::vector<dxaug::IcdEntry> entries;
  for (int parent = 0; entries.size() < target; ++parent) {
    std::string code4 = "K" + std::to_string(10 + parent) + "." +
                        std::to_string(parent % 10);
    const bool has_parent_entry = coin(0.8);
    if (has_parent_entry) {
      entries.push_back({code4, dxaug::TermText(name()), dxaug::Granularity::FourDigit});
    }
    const int kids = std::uniform_int_distribution<int>(0, 5)(rng);
    for (int k = 1; k <= kids && entries.size() < target; ++k) {
      std::string code6 = code4 + (k < 10 ? "0" : "") + std::to_string(k);
      entries.push_back({code6, dxaug::TermText(name()), dxaug::Granularity::SixDigit});
    }
  }
  w.vocab = dxaug::IcdVocabulary(std::move(entries));

  const std::vector<std::string> prefixes = {"", "左", "右侧", "疑似"};
  const std::vector<std::string> suffixes = {"", "待查", "术后"};
  for (const auto& e : w.vocab.entries()) {
    if (!coin(0.4)) continue;
    std::string u = pick(prefixes) + e.name.raw() + pick(suffixes);
    if (u == e.name.raw()) u = "左" + u;
    w.tasks.push_back({dxaug::TermText(u), e.name, e.code,
                       dxaug::Provenance::Original, std::nullopt});
  }
  return w;
}

}  // namespace testing
