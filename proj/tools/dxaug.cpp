// dxaug: disease-name pair augmentation and evaluation.
//
//   dxaug augment --config run.ini [--seed N] [--alpha X] [--beta X]
//                 [--methods ar1,ar2,mga-code,mga-region] [--workers N]
//                 [--format tsv|jsonl] [--output DIR]
//   dxaug tag     --config run.ini terms.txt
//   dxaug score   [--config run.ini] pairs.tsv | --pair U S
//   dxaug stats   dataset.jsonl
//   dxaug eval    --train T --augmented A --valid V [--k 5]
//                 [--fractions 0.05,0.1,0.3,0.5,1.0] [--seed N]
//
// Exit status: 0 success, 1 input error, 2 config error.

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dxaug/augment.hpp"
#include "dxaug/dataset.hpp"
#include "dxaug/errors.hpp"
#include "dxaug/eval.hpp"
#include "dxaug/filter.hpp"
#include "dxaug/pipeline.hpp"
#include "dxaug/tagger.hpp"
#include "dxaug/vocab.hpp"

namespace {

using namespace dxaug;

constexpr int kInputError = 1;
constexpr int kConfigError = 2;

std::vector<std::string> read_lines(const std::string& path) {
  std::vector<std::string> out;
  if (path == "-") {
    for (auto& [n, line] : read_record_lines(std::cin)) out.push_back(line);
    return out;
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path, 0, "cannot open file");
  for (auto& [n, line] : read_record_lines(in)) out.push_back(line);
  return out;
}

std::vector<double> parse_fractions(const std::string& csv) {
  std::vector<double> out;
  for (const std::string& f : split(csv, ",")) {
    if (f.empty()) continue;
    try {
      std::size_t used = 0;
      double x = std::stod(f, &used);
      if (used != f.size()) throw std::invalid_argument(f);
      out.push_back(x);
    } catch (const std::exception&) {
      throw ConfigError("bad fraction '" + f + "'");
    }
  }
  if (out.empty()) throw ConfigError("no fractions given");
  return out;
}

std::string fixed(double x, int digits = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << x;
  return s.str();
}

nlohmann::ordered_json report_json(const std::string& condition, double fraction,
                                   const EvalReport& r) {
  nlohmann::ordered_json j;
  j["condition"] = condition;
  j["fraction"] = fraction;
  j["n_queries"] = r.n_queries;
  j["k"] = r.k;
  j["accuracy"] = r.accuracy;
  j["f1"] = r.f1;
  j["recall_at_k"] = r.recall_at_k;
  j["ndcg_at_k"] = r.ndcg_at_k;
  return j;
}

// --- augment ---------------------------------------------------------------

struct AugmentArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<std::string> methods;
  std::optional<std::size_t> workers;
  std::optional<std::string> format;
  std::optional<std::string> output;
};

int cmd_augment(const AugmentArgs& a) {
  PipelineConfig cfg = PipelineConfig::from_file(a.config);
  if (a.seed) cfg.seed = *a.seed;
  if (a.alpha) cfg.alpha = *a.alpha;
  if (a.beta) cfg.beta = *a.beta;
  if (a.methods) {
    cfg.augment.enabled_methods =
        *a.methods == "none" ? std::set<Provenance>{} : parse_methods(*a.methods);
  }
  if (a.workers) cfg.workers = *a.workers;
  if (a.format) {
    try {
      cfg.output_format = parse_format(*a.format);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (a.output) cfg.output_dir = *a.output;

  RunResult r = run(cfg);
  std::cout << r.stats.to_text();
  std::cout << "wall_seconds\t" << fixed(r.stats.wall_seconds, 3) << '\n';
  std::cout << "dataset\t" << r.dataset_path << '\n'
            << "augmented\t" << r.augmented_path << '\n'
            << "original\t" << r.original_path << '\n';
  return 0;
}

// --- tag -------------------------------------------------------------------

std::shared_ptr<const Tagger> tagger_from(const std::string& config,
                                          const std::string& centers,
                                          const std::string& regions,
                                          const std::string& characteristics,
                                          const std::string& pretagged) {
  InputPaths in;
  if (!config.empty()) in = PipelineConfig::from_file(config).input;
  if (!centers.empty()) in.centers = centers;
  if (!regions.empty()) in.regions = regions;
  if (!characteristics.empty()) in.characteristics = characteristics;
  if (!pretagged.empty()) in.pretagged = pretagged;

  std::shared_ptr<const Tagger> tagger;
  if (!in.centers.empty() || !in.regions.empty() || !in.characteristics.empty()) {
    if (in.centers.empty() || in.regions.empty() || in.characteristics.empty()) {
      throw ConfigError("need all three lexicons");
    }
    tagger = std::make_shared<LexiconTagger>(
        load_lexicons(in.centers, in.regions, in.characteristics));
  }
  if (!in.pretagged.empty()) {
    tagger = std::make_shared<PretaggedTagger>(load_pretagged(in.pretagged), tagger);
  }
  if (!tagger) throw ConfigError("no lexicons or pretagged file given");
  return tagger;
}

int cmd_tag(const std::string& config, const std::string& centers,
            const std::string& regions, const std::string& characteristics,
            const std::string& pretagged, const std::string& terms_path) {
  auto tagger = tagger_from(config, centers, regions, characteristics, pretagged);
  std::size_t lineno = 0;
  for (const std::string& line : read_lines(terms_path)) {
    ++lineno;
    TermText term = [&] {
      try {
        return TermText(line);
      } catch (const std::invalid_argument& e) {
        throw InputError(terms_path, lineno, e.what());
      }
    }();
    auto bio = spans_to_bio(tagger->tag(term));
    std::cout << term.raw() << '\t';
    for (std::size_t i = 0; i < bio.size(); ++i) {
      std::cout << (i ? " " : "") << bio[i];
    }
    std::cout << '\n';
  }
  return 0;
}

// --- score -----------------------------------------------------------------

int cmd_score(const std::string& config, const std::string& embeddings,
              const std::vector<std::string>& pair,
              const std::string& pairs_path, std::optional<double> alpha,
              std::optional<double> beta) {
  FilterConfig fc;
  std::size_t dim = 256;
  std::string emb = embeddings;
  if (!config.empty()) {
    PipelineConfig pc = PipelineConfig::from_file(config);
    fc.alpha = pc.alpha;
    fc.beta = pc.beta;
    fc.ngm_mode = pc.ngm_mode;
    dim = pc.embedding_dimension;
    if (emb.empty()) emb = pc.input.embeddings;
  }
  if (alpha) fc.alpha = *alpha;
  if (beta) fc.beta = *beta;
  fc.embedder = emb.empty() ? std::shared_ptr<const EmbeddingProvider>(
                                  std::make_shared<HashedNgramEmbedder>(dim))
                            : std::make_shared<VectorFileEmbedder>(
                                  VectorFileEmbedder::load(emb));
  try {
    fc.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  std::vector<std::pair<std::string, std::string>> items;
  if (!pair.empty()) items.emplace_back(pair[0], pair[1]);
  if (!pairs_path.empty()) {
    std::size_t lineno = 0;
    for (const std::string& line : read_lines(pairs_path)) {
      ++lineno;
      auto f = split(line, "\t");
      if (f.size() < 2) throw InputError(pairs_path, lineno, "expected u<TAB>s");
      items.emplace_back(f[0], f[1]);
    }
  }
  if (items.empty()) throw ConfigError("nothing to score");

  std::cout << "unnormalized\tstandard\tngm\tcos\tkept\n";
  for (const auto& [u, s] : items) {
    TermText tu(u);
    TermText ts(s);
    double ngm = ngm_score(tu, ts, fc.ngm_mode);
    std::string cos_text = "NA";
    bool kept = false;
    try {
      double c = cosine(fc.embedder->embed(tu), fc.embedder->embed(ts));
      cos_text = fixed(c, 6);
      kept = ngm > fc.alpha && c > fc.beta;
    } catch (const EmbeddingUnavailable&) {
    }
    std::cout << tu.raw() << '\t' << ts.raw() << '\t' << fixed(ngm, 6) << '\t'
              << cos_text << '\t' << (kept ? "yes" : "no") << '\n';
  }
  return 0;
}

// --- stats -----------------------------------------------------------------

int cmd_stats(const std::string& path, const std::string& format) {
  FileFormat f = format.empty() ? format_from_path(path) : parse_format(format);
  std::vector<NormPair> pairs = read_dataset(path, f);
  struct Acc {
    std::size_t n = 0, scored = 0;
    double ngm = 0, cos = 0;
    double min_ngm = INFINITY, min_cos = INFINITY;
  };
  std::map<Provenance, Acc> acc;
  std::set<std::string> standards, unnormalized;
  for (const NormPair& p : pairs) {
    Acc& a = acc[p.provenance];
    ++a.n;
    standards.insert(p.standard.raw());
    unnormalized.insert(p.unnormalized.raw());
    if (p.scores) {
      ++a.scored;
      a.ngm += p.scores->ngm;
      a.cos += p.scores->cos;
      a.min_ngm = std::min(a.min_ngm, p.scores->ngm);
      a.min_cos = std::min(a.min_cos, p.scores->cos);
    }
  }
  std::cout << "provenance\tpairs\tmean_ngm\tmin_ngm\tmean_cos\tmin_cos\n";
  for (const auto& [prov, a] : acc) {
    std::cout << to_string(prov) << '\t' << a.n << '\t';
    if (a.scored) {
      std::cout << fixed(a.ngm / a.scored) << '\t' << fixed(a.min_ngm) << '\t'
                << fixed(a.cos / a.scored) << '\t' << fixed(a.min_cos) << '\n';
    } else {
      std::cout << "-\t-\t-\t-\n";
    }
  }
  std::cout << "total\t" << pairs.size() << '\n'
            << "distinct_standard\t" << standards.size() << '\n'
            << "distinct_unnormalized\t" << unnormalized.size() << '\n';
  return 0;
}

// --- eval ------------------------------------------------------------------

struct EvalArgs {
  std::string train, augmented, valid, vocab, report;
  std::string train_format, valid_format, augmented_format;
  std::string delimiter = std::string(kDefaultGoldDelimiter);
  std::size_t k = 5;
  std::string fractions = "0.05,0.1,0.3,0.5,1.0";
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  std::optional<double> f1_threshold;
};

FileFormat pick(const std::string& flag, const std::string& path) {
  if (flag.empty()) return format_from_path(path);
  try {
    return parse_format(flag);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

int cmd_eval(const EvalArgs& a) {
  if (a.k == 0) throw ConfigError("--k must be >= 1");
  std::vector<double> fractions = parse_fractions(a.fractions);

  SubsampleSetup setup;
  setup.train = load_task_pairs(a.train, pick(a.train_format, a.train), a.delimiter);
  setup.valid = group_queries(
      load_task_pairs(a.valid, pick(a.valid_format, a.valid), a.delimiter));
  if (setup.valid.empty()) throw InputError(a.valid, 0, "no validation queries");
  if (!a.augmented.empty()) {
    std::size_t skipped = 0;
    for (NormPair& p : read_dataset(a.augmented, pick(a.augmented_format, a.augmented))) {
      if (p.provenance == Provenance::Original) {
        ++skipped;
        continue;
      }
      setup.augmented.push_back(std::move(p));
    }
    if (skipped) {
      std::cerr << "note: ignored " << skipped
                << " original pairs in the augmented file\n";
    }
  }
  if (!a.vocab.empty()) {
    const IcdVocabulary vocab = load_icd(a.vocab, format_from_path(a.vocab));
    for (const IcdEntry& e : vocab.entries()) {
      setup.extra_labels.push_back(e.name);
    }
  }
  setup.eval.k = a.k;
  setup.eval.workers = a.workers;
  setup.eval.f1_threshold = a.f1_threshold;

  std::vector<nlohmann::ordered_json> rows;
  auto base = subsample_experiment(setup, fractions, a.seed, false);
  std::vector<std::pair<double, EvalReport>> aug;
  std::optional<EvalReport> zero_shot;
  if (!setup.augmented.empty()) {
    aug = subsample_experiment(setup, fractions, a.seed, true);
    zero_shot = subsample_experiment(setup, {0.0}, a.seed, true).front().second;
  }
  for (const auto& [f, r] : base) rows.push_back(report_json("original", f, r));
  for (const auto& [f, r] : aug) rows.push_back(report_json("augmented", f, r));
  if (zero_shot) rows.push_back(report_json("zero-shot", 0.0, *zero_shot));

  if (!a.report.empty()) {
    std::ofstream out(a.report, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError(a.report, 0, "cannot open for writing");
    for (const auto& j : rows) out << j.dump() << '\n';
  } else {
    for (const auto& j : rows) std::cout << j.dump() << '\n';
  }

  const std::string rk = "R@" + std::to_string(a.k);
  const std::string nk = "NDCG@" + std::to_string(a.k);
  std::cout << "\nfraction  condition  Acc     F1      " << rk << "     " << nk << '\n';
  auto line = [&](double f, const char* cond, const EvalReport& r) {
    std::cout << std::left << std::setw(10) << fixed(f, 2) << std::setw(11) << cond
              << fixed(r.accuracy) << "  " << fixed(r.f1) << "  "
              << fixed(r.recall_at_k) << "  " << fixed(r.ndcg_at_k) << '\n';
  };
  for (std::size_t i = 0; i < base.size(); ++i) {
    line(base[i].first, "original", base[i].second);
    if (i < aug.size()) line(aug[i].first, "augmented", aug[i].second);
  }
  if (zero_shot) line(0.0, "zero-shot", *zero_shot);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Disease-name normalization pair augmentation"};
  app.require_subcommand(1);

  AugmentArgs aug;
  auto* augment = app.add_subcommand("augment", "run the full augmentation pipeline");
  augment->add_option("--config", aug.config, "pipeline config file")->required();
  augment->add_option("--seed", aug.seed, "RNG seed");
  augment->add_option("--alpha", aug.alpha, "ngm threshold");
  augment->add_option("--beta", aug.beta, "cosine threshold");
  augment->add_option("--methods", aug.methods,
                      "comma list of ar1,ar2,mga-code,mga-region, or none");
  augment->add_option("--workers", aug.workers, "worker threads");
  augment->add_option("--format", aug.format, "tsv|jsonl");
  augment->add_option("--output", aug.output, "output directory");

  std::string config, centers, regions, characteristics, pretagged, terms_path;
  auto* tag = app.add_subcommand("tag", "print BIO axis tags for a term list");
  tag->add_option("--config", config, "pipeline config file (lexicon paths)");
  tag->add_option("--centers", centers);
  tag->add_option("--regions", regions);
  tag->add_option("--characteristics", characteristics);
  tag->add_option("--pretagged", pretagged);
  tag->add_option("terms", terms_path, "one term per line, - for stdin")->required();

  std::string embeddings, pairs_path;
  std::vector<std::string> pair;
  std::optional<double> alpha, beta;
  auto* score = app.add_subcommand("score", "print ngm and cosine scores");
  score->add_option("--config", config, "pipeline config file");
  score->add_option("--embeddings", embeddings, "precomputed vector file");
  score->add_option("--pair", pair, "unnormalized and standard name")->expected(2);
  score->add_option("--alpha", alpha);
  score->add_option("--beta", beta);
  score->add_option("pairs", pairs_path, "TSV of u<TAB>s, - for stdin");

  std::string stats_path, stats_format;
  auto* stats = app.add_subcommand("stats", "summarize a dataset file");
  stats->add_option("dataset", stats_path)->required();
  stats->add_option("--format", stats_format, "tsv|jsonl (default: by extension)");

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "retrieval evaluation with subsampling");
  eval->add_option("--train", ev.train, "seed training pairs")->required();
  eval->add_option("--augmented", ev.augmented, "augmented dataset file");
  eval->add_option("--valid", ev.valid, "validation pairs")->required();
  eval->add_option("--vocab", ev.vocab, "ICD file adding every name to the label space");
  eval->add_option("--k", ev.k, "cutoff for recall and NDCG");
  eval->add_option("--fractions", ev.fractions, "comma list of training fractions");
  eval->add_option("--seed", ev.seed, "subsampling seed");
  eval->add_option("--workers", ev.workers, "worker threads");
  eval->add_option("--f1-threshold", ev.f1_threshold,
                   "predict every top-k name scoring at least this for F1");
  eval->add_option("--train-format", ev.train_format, "tsv|jsonl (default: by extension)");
  eval->add_option("--valid-format", ev.valid_format, "tsv|jsonl (default: by extension)");
  eval->add_option("--augmented-format", ev.augmented_format, "tsv|jsonl (default: by extension)");
  eval->add_option("--delimiter", ev.delimiter, "gold-standard delimiter");
  eval->add_option("--report", ev.report, "write JSONL reports here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (*augment) return cmd_augment(aug);
    if (*tag) {
      return cmd_tag(config, centers, regions, characteristics, pretagged, terms_path);
    }
    if (*score) return cmd_score(config, embeddings, pair, pairs_path, alpha, beta);
    if (*stats) return cmd_stats(stats_path, stats_format);
    if (*eval) return cmd_eval(ev);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
  return 0;
}
