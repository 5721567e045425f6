#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "dxaug/errors.hpp"
#include "dxaug/filter.hpp"
#include "support.hpp"

using namespace dxaug;

namespace {

NormPair generated(const std::string& u, const std::string& s,
                   Provenance p = Provenance::AR1) {
  return {TermText(u), TermText(s), std::nullopt, p, std::nullopt};
}

std::shared_ptr<VectorFileEmbedder> vectors(const std::string& text) {
  std::istringstream in(text);
  return std::make_shared<VectorFileEmbedder>(VectorFileEmbedder::read(in, "vec"));
}

}  // namespace

TEST_CASE("ngm hand cases") {
  CHECK(ngm_score(TermText("a"), TermText("a")) == 1.0);
  CHECK(ngm_score(TermText("abc"), TermText("xyz")) == 0.0);
  CHECK(ngm_score(TermText("abc"), TermText("abd")) == 1.0);
  CHECK(ngm_score(TermText("abcd"), TermText("ab")) == 1.5);
  CHECK(ngm_score(TermText("颈动脉夹层"), TermText("颈总动脉夹层")) == doctest::Approx(2.2));
  // Repeats count per occurrence in multiset mode, once in distinct mode.
  CHECK(ngm_score(TermText("aab"), TermText("aaa")) == 1.0);
  CHECK(ngm_score(TermText("aab"), TermText("aaa"), NgmMode::DistinctSet) ==
        doctest::Approx(2.0 / 3.0));
}

TEST_CASE("ngm agrees with the substring oracle") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 3000; ++i) {
    std::u32string u = testing::random_cps(rng, testing::kCjk.substr(0, 6), 1, 9);
    std::u32string s = testing::random_cps(rng, testing::kCjk.substr(0, 6), 1, 9);
    TermText tu(u32_to_utf8(u)), ts(u32_to_utf8(s));
    CHECK(std::abs(ngm_score(tu, ts) - testing::oracle_ngm(u, s)) <= 1e-12);
    CHECK(std::abs(ngm_score(tu, ts, NgmMode::DistinctSet) -
                   testing::oracle_ngm(u, s, true)) <= 1e-12);
  }
}

TEST_CASE("ngm self score, symmetry and range") {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 500; ++i) {
    TermText a(testing::random_term(rng, testing::kCjk, 1, 12));
    TermText b(testing::random_term(rng, testing::kCjk, 1, 12));
    CHECK(ngm_score(a, a) == (static_cast<double>(a.length()) + 1.0) / 2.0);
    CHECK(ngm_score(a, b) == ngm_score(b, a));
    CHECK(ngm_score(a, b) >= 0.0);
    const double m = static_cast<double>(std::min(a.length(), b.length()));
    CHECK(ngm_score(a, b) <= (m + 1.0) / 2.0);
  }
}

TEST_CASE("hashed embedder") {
  HashedNgramEmbedder e(64);
  TermText t("肺恶性");
  auto v = e.embed(t);
  CHECK(v.size() == 64);
  CHECK(std::accumulate(v.begin(), v.end(), 0.0) == 5.0);  // 3 unigrams + 2 bigrams
  CHECK(e.embed(t) == v);
  // Each gram lands in the FNV-1a bucket of its UTF-8 bytes.
  std::vector<double> want(64, 0.0);
  for (std::string g : {"肺", "恶", "性", "肺恶", "恶性"}) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : g) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    want[h % 64] += 1.0;
  }
  CHECK(v == want);

  std::mt19937_64 rng(4);
  HashedNgramEmbedder d;
  for (int i = 0; i < 200; ++i) {
    TermText r(testing::random_term(rng, testing::kCjk, 1, 15));
    auto x = d.embed(r);
    CHECK(x.size() == 256);
    CHECK(std::accumulate(x.begin(), x.end(), 0.0) ==
          static_cast<double>(2 * r.length() - 1));
  }
  CHECK_THROWS_AS(HashedNgramEmbedder(0), std::invalid_argument);
}

TEST_CASE("cosine") {
  std::vector<double> a{1, 2, 3};
  CHECK(cosine(a, a) == doctest::Approx(1.0));
  CHECK(cosine(std::vector<double>{1, 0}, std::vector<double>{0, 1}) == 0.0);
  CHECK(cosine(std::vector<double>{1, 1, 0}, std::vector<double>{1, 0, 0}) ==
        doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK_THROWS_AS(cosine(std::vector<double>{1}, std::vector<double>{1, 2}),
                  std::invalid_argument);
  CHECK_THROWS_AS(cosine(std::vector<double>{0, 0}, std::vector<double>{1, 2}),
                  std::invalid_argument);
}

TEST_CASE("vector file provider") {
  auto p = vectors("肺癌\t1,2,3\n肝癌\t 0.5, -1 ,2\n");
  CHECK(p->dimension() == 3);
  CHECK(p->embed(TermText("肝癌")) == std::vector<double>{0.5, -1, 2});
  CHECK_THROWS_AS(p->embed(TermText("胃癌")), EmbeddingUnavailable);
  CHECK_THROWS_AS(vectors("a\t1,2\nb\t1\n"), InputError);
  CHECK_THROWS_AS(vectors("a\t1,2\na\t1,3\n"), InputError);
  CHECK_THROWS_AS(vectors("a\t1,x\n"), InputError);
}

TEST_CASE("filter keeps strictly above both thresholds") {
  FilterConfig cfg;
  CHECK(cfg.alpha == 0.7);
  CHECK(cfg.beta == 0.8);

  // 7 shared characters, none adjacent in both, shorter side 10 long.
  const std::string u = "甲乙丙丁戊己庚辛壬癸";
  const std::string s = "甲子乙丑丙寅丁卯戊辰己巳庚午";
  REQUIRE(testing::oracle_ngm(utf8_to_u32(u), utf8_to_u32(s)) == 0.7);
  auto r = filter_pairs({generated(u, s)}, cfg);
  CHECK(r.kept.empty());
  CHECK(r.dropped_by_reason.at(kDropNgm) == 1);

  // cos exactly 0.8 from (4,3) against (5,0).
  cfg.embedder = vectors("颈动脉夹层\t4,3\n颈总动脉夹层\t5,0\n肺癌\t1,0\n");
  auto r2 = filter_pairs({generated("颈动脉夹层", "颈总动脉夹层")}, cfg);
  CHECK(r2.kept.empty());
  CHECK(r2.dropped_by_reason.at(kDropCos) == 1);
  cfg.beta = 0.79;
  auto r3 = filter_pairs({generated("颈动脉夹层", "颈总动脉夹层")}, cfg);
  REQUIRE(r3.kept.size() == 1);
  CHECK(r3.kept[0].scores->ngm == doctest::Approx(2.2));
  CHECK(r3.kept[0].scores->cos == doctest::Approx(0.8));

  // Missing vector, after passing ngm.
  auto r4 = filter_pairs({generated("肺癌", "肺癌灶")}, cfg);
  CHECK(r4.dropped_by_reason.at(kDropEmbedding) == 1);
  CHECK(r4.dropped_by_provenance.at(Provenance::AR1).at(kDropEmbedding) == 1);
}

TEST_CASE("filter basics") {
  FilterConfig cfg;
  auto r = filter_pairs({generated("肺恶性肿瘤", "肺恶性肿瘤"), generated("甲乙", "丙丁"),
                         {TermText("甲乙"), TermText("丙丁"), std::nullopt,
                          Provenance::Original, std::nullopt}},
                        cfg);
  REQUIRE(r.kept.size() == 2);
  CHECK(r.kept[0].scores->cos == doctest::Approx(1.0));
  CHECK(r.kept[1].provenance == Provenance::Original);
  CHECK_FALSE(r.kept[1].scores);
  CHECK(r.dropped_total() == 1);
  CHECK(r.dropped_by_reason.at(kDropNgm) == 1);

  cfg.alpha = -1;
  CHECK_THROWS_AS(filter_pairs({}, cfg), std::invalid_argument);
}

TEST_CASE("filter is monotone in its thresholds and thread-independent") {
  std::mt19937_64 rng(8);
  std::vector<NormPair> pairs;
  for (int i = 0; i < 1000; ++i) {
    std::string s = testing::random_term(rng, testing::kCjk, 2, 8);
    std::u32string u = utf8_to_u32(s);
    u[std::uniform_int_distribution<std::size_t>(0, u.size() - 1)(rng)] =
        testing::kCjk[std::uniform_int_distribution<std::size_t>(0, testing::kCjk.size() - 1)(rng)];
    pairs.push_back(generated(u32_to_utf8(u), s));
  }
  FilterConfig strict, loose, threaded;
  loose.alpha = 0.5;
  loose.beta = 0.5;
  threaded.workers = 4;
  auto a = filter_pairs(pairs, strict).kept;
  auto b = filter_pairs(pairs, loose).kept;
  CHECK(a.size() > 0);
  CHECK(b.size() > a.size());
  for (const auto& p : a) CHECK(std::find(b.begin(), b.end(), p) != b.end());
  CHECK(filter_pairs(pairs, threaded).kept == a);
}
