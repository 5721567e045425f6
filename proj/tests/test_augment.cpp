#include <doctest.h>

#include <limits>
#include <random>

#include "dxaug/augment.hpp"
#include "support.hpp"

using namespace dxaug;

namespace {

IcdVocabulary vocab_of(std::vector<std::pair<std::string, std::string>> rows) {
  std::vector<IcdEntry> entries;
  for (auto& [code, name] : rows) {
    entries.push_back({code, TermText(name), *granularity_of(code)});
  }
  return IcdVocabulary(std::move(entries));
}

NormPair original(const std::string& u, const std::string& s,
                  std::optional<std::string> code = std::nullopt) {
  return {TermText(u), TermText(s), std::move(code), Provenance::Original, std::nullopt};
}

AugConfig uncapped() {
  AugConfig c;
  c.max_pairs_per_source = std::numeric_limits<std::size_t>::max();
  return c;
}

AxisLexicons toy_lexicons() {
  return load_lexicons(testing::data_path("toy/centers.txt"),
                       testing::data_path("toy/regions.txt"),
                       testing::data_path("toy/characteristics.txt"));
}

}  // namespace

TEST_CASE("replace_span") {
  TermText t("髂总动脉夹层");
  CHECK(replace_span(t, {0, 1, AxisLabel::Region}, "颈").raw() == "颈总动脉夹层");
  CHECK(replace_span(t, {4, 6, AxisLabel::Center}, "夹层") == t);
  TermText once = replace_span(t, {4, 6, AxisLabel::Center}, "狭窄");
  CHECK(replace_span(once, {4, 6, AxisLabel::Center}, "夹层") == t);
  CHECK_THROWS_AS(replace_span(t, {5, 7, AxisLabel::Center}, "x"), std::out_of_range);
  CHECK_THROWS_AS(replace_span(t, {2, 2, AxisLabel::Center}, "x"), std::out_of_range);
  CHECK_THROWS_AS(replace_span(t, {0, 1, AxisLabel::Region}, ""), std::invalid_argument);
}

TEST_CASE("AR1 swaps a region between names sharing a center") {
  AxisLexicons lex = toy_lexicons();
  LexiconTagger tagger(lex);
  IcdVocabulary v = vocab_of({{"I77.701", "髂总动脉夹层"}, {"I77.702", "颈动脉夹层"}});
  auto idx = build_index(v, {}, tagger);
  auto got = testing::keys(ar1(v, idx, uncapped()));
  CHECK(got == std::set<testing::PairKey>{
                   {"颈总动脉夹层", "颈动脉夹层", "I77.702"},
                   {"髂动脉夹层", "髂总动脉夹层", "I77.701"}});
}

TEST_CASE("AR1 never emits a pair whose sides are equal") {
  AxisLexicons lex = toy_lexicons();
  LexiconTagger tagger(lex);
  IcdVocabulary v = vocab_of({{"I77.701", "髂总动脉夹层"}, {"I77.703", "颈总动脉夹层"}});
  auto idx = build_index(v, {}, tagger);
  // Each swap reproduces the other name exactly.
  CHECK(ar1(v, idx, uncapped()).empty());
}

TEST_CASE("AR1 needs a shared axis") {
  AxisLexicons lex = toy_lexicons();
  LexiconTagger tagger(lex);
  IcdVocabulary v = vocab_of({{"I77.701", "髂总动脉夹层"}, {"I65.2", "颈动脉狭窄"}});
  auto idx = build_index(v, {}, tagger);
  CHECK(ar1(v, idx, uncapped()).empty());
}

TEST_CASE("AR1 on three names sharing a center") {
  AxisLexicons lex;
  lex.centers = {"癌"};
  lex.regions = {"肺", "肝", "胃"};
  lex.characteristics = {"急性"};
  LexiconTagger tagger(lex);
  IcdVocabulary v =
      vocab_of({{"C34.901", "肺甲癌"}, {"C22.901", "肝乙癌"}, {"C16.901", "胃丙癌"}});
  auto idx = build_index(v, {}, tagger);
  auto pairs = ar1(v, idx, uncapped());
  CHECK(pairs.size() == 6);
  CHECK(testing::keys(pairs) == testing::oracle_ar1(v, lex));
}

TEST_CASE("AR2 rewrites the unnormalized side") {
  AxisLexicons lex;
  lex.centers = {"恶性肿瘤", "癌"};
  lex.regions = {"肺", "肝"};
  lex.characteristics = {"急性"};
  LexiconTagger tagger(lex);
  IcdVocabulary v = vocab_of({{"C34.9", "肺恶性肿瘤"}, {"C22.9", "肝恶性肿瘤"}});
  std::vector<NormPair> tasks = {original("左肺癌", "肺恶性肿瘤", "C34.9")};
  auto idx = build_index(v, tasks, tagger);
  auto got = ar2(tasks, v, idx, uncapped());
  REQUIRE(got.size() == 1);
  CHECK(got[0].unnormalized.raw() == "左肝癌");
  CHECK(got[0].standard.raw() == "肝恶性肿瘤");
  CHECK(got[0].standard_code == "C22.9");
  CHECK(got[0].provenance == Provenance::AR2);

  // The standard's region does not occur in U.
  std::vector<NormPair> absent = {original("左侧癌", "肺恶性肿瘤")};
  auto idx2 = build_index(v, absent, tagger);
  CHECK(ar2(absent, v, idx2, uncapped()).empty());

  // C equal to S on every axis.
  IcdVocabulary same = vocab_of({{"C34.9", "肺恶性肿瘤"}, {"C34.901", "肺恶性肿瘤"}});
  auto idx3 = build_index(same, tasks, tagger);
  CHECK(ar2(tasks, same, idx3, uncapped()).empty());
}

TEST_CASE("MGA-Code pairs each parent with its children") {
  IcdVocabulary a18 = load_icd(testing::data_path("a18/icd.tsv"), FileFormat::TSV);
  auto pairs = mga_code(a18);
  CHECK(pairs.size() == 10);
  for (const auto& p : pairs) {
    CHECK(p.unnormalized.raw() == "外周结核性淋巴结炎");
    CHECK(p.standard_code->rfind("A18.2", 0) == 0);
    CHECK(p.provenance == Provenance::MgaCode);
  }
  CHECK(testing::keys(pairs) == testing::oracle_mga_code(a18));

  IcdVocabulary two = vocab_of({{"A01.1", "甲"}, {"A01.101", "乙"}, {"A01.102", "丙"},
                                {"A01.103", "丁"}, {"A02.1", "戊"}});
  CHECK(mga_code(two).size() == 3);
}

TEST_CASE("MGA-Region pairs the larger region with the smaller") {
  AxisLexicons lex = toy_lexicons();
  LexiconTagger tagger(lex);
  RegionTree tree;
  tree.add_edge("腹股沟", "下肢");
  IcdVocabulary v = vocab_of({{"A18.201", "腹股沟淋巴结结核"}, {"A18.203", "下肢淋巴结结核"}});
  auto idx = build_index(v, {}, tagger);
  auto got = testing::keys(mga_region(v, idx, tree));
  CHECK(got == std::set<testing::PairKey>{{"下肢淋巴结结核", "腹股沟淋巴结结核", "A18.201"}});

  IcdVocabulary same = vocab_of({{"A18.201", "腹股沟淋巴结结核"}, {"A18.204", "腹股沟淋巴结炎"}});
  CHECK(mga_region(same, build_index(same, {}, tagger), tree).empty());
  IcdVocabulary diff = vocab_of({{"A18.201", "腹股沟淋巴结结核"}, {"A18.203", "下肢淋巴结炎"}});
  CHECK(mga_region(diff, build_index(diff, {}, tagger), tree).empty());
}

TEST_CASE("generators match exhaustive enumeration on random vocabularies") {
  std::mt19937_64 rng(2024);
  for (int round = 0; round < 200; ++round) {
    testing::World w = testing::random_world(rng);
    LexiconTagger tagger(w.lex);
    auto idx = build_index(w.vocab, w.tasks, tagger);
    CAPTURE(round);
    CHECK(testing::keys(ar1(w.vocab, idx, uncapped())) == testing::oracle_ar1(w.vocab, w.lex));
    CHECK(testing::keys(ar2(w.tasks, w.vocab, idx, uncapped())) ==
          testing::oracle_ar2(w.tasks, w.vocab, w.lex));
    CHECK(testing::keys(mga_code(w.vocab)) == testing::oracle_mga_code(w.vocab));
    CHECK(testing::keys(mga_region(w.vocab, idx, w.tree)) ==
          testing::oracle_mga_region(w.vocab, w.lex, w.edges));
  }
}

TEST_CASE("generated pairs are never self pairs and are canonically sorted") {
  std::mt19937_64 rng(77);
  for (int round = 0; round < 50; ++round) {
    testing::World w = testing::random_world(rng);
    LexiconTagger tagger(w.lex);
    auto idx = build_index(w.vocab, w.tasks, tagger);
    for (const auto& out : {ar1(w.vocab, idx, AugConfig{}),
                            ar2(w.tasks, w.vocab, idx, AugConfig{}), mga_code(w.vocab),
                            mga_region(w.vocab, idx, w.tree)}) {
      CHECK(std::is_sorted(out.begin(), out.end(), canonical_less));
      for (const auto& p : out) CHECK(p.unnormalized != p.standard);
    }
  }
}

TEST_CASE("caps sample within each source, deterministically") {
  std::mt19937_64 rng(31);
  for (int round = 0; round < 50; ++round) {
    testing::World w = testing::random_world(rng);
    LexiconTagger tagger(w.lex);
    auto idx = build_index(w.vocab, w.tasks, tagger);
    AugConfig capped;
    capped.max_pairs_per_source = 1;
    capped.rng_seed = 99;
    auto full = testing::keys(ar1(w.vocab, idx, uncapped()));
    auto a = ar1(w.vocab, idx, capped);
    CHECK(a.size() <= w.vocab.size());
    for (const auto& k : testing::keys(a)) CHECK(full.count(k) == 1);

    AugConfig threaded = capped;
    threaded.workers = 4;
    CHECK(ar1(w.vocab, idx, threaded) == a);
    CHECK(ar2(w.tasks, w.vocab, idx, threaded) == ar2(w.tasks, w.vocab, idx, capped));
  }
}

TEST_CASE("sample_pairs") {
  std::vector<NormPair> pairs;
  for (int i = 0; i < 50; ++i) {
    pairs.push_back(original("u" + std::to_string(i), "s"));
  }
  auto a = sample_pairs(pairs, 10, 1, "k");
  CHECK(a.size() == 10);
  CHECK(a == sample_pairs(pairs, 10, 1, "k"));
  CHECK(a != sample_pairs(pairs, 10, 2, "k"));
  CHECK(a != sample_pairs(pairs, 10, 1, "other"));
  // Order of survivors follows the input.
  std::vector<std::size_t> at;
  for (const auto& p : a) {
    at.push_back(static_cast<std::size_t>(
        std::find(pairs.begin(), pairs.end(), p) - pairs.begin()));
  }
  CHECK(std::is_sorted(at.begin(), at.end()));
  CHECK(sample_pairs(pairs, 60, 1, "k") == pairs);

  // Every index is reachable: over many keys each item is drawn at least once.
  std::vector<int> hits(pairs.size());
  for (int key = 0; key < 200; ++key) {
    for (const auto& p : sample_pairs(pairs, 5, 7, std::to_string(key))) {
      ++hits[static_cast<std::size_t>(std::find(pairs.begin(), pairs.end(), p) - pairs.begin())];
    }
  }
  for (int h : hits) CHECK(h > 0);
}

TEST_CASE("AugConfig validation") {
  AugConfig c;
  c.max_pairs_per_source = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  AugConfig d;
  d.enabled_methods.insert(Provenance::Original);
  CHECK_THROWS_AS(d.validate(), std::invalid_argument);
}
