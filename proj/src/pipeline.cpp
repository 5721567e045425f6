#include "dxaug/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <filesystem>
#include <memory>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "dxaug/dataset.hpp"
#include "dxaug/errors.hpp"
#include "dxaug/tagger.hpp"

namespace dxaug {

namespace fs = std::filesystem;

namespace {

std::string trim(std::string s) {
  auto notspace = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
  s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
  return s;
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  T x{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), x);
  if (ec != std::errc() || ptr != value.data() + value.size() || value.empty()) {
    throw ConfigError("bad value for " + key + ": '" + value + "'");
  }
  return x;
}

FileFormat format_value(const std::string& key, const std::string& value) {
  try {
    return parse_format(value);
  } catch (const std::invalid_argument&) {
    throw ConfigError("bad value for " + key + ": '" + value + "'");
  }
}

}  // namespace

std::set<Provenance> parse_methods(const std::string& csv) {
  std::set<Provenance> out;
  for (const std::string& raw : split(csv, ",")) {
    std::string m = trim(raw);
    if (m.empty()) continue;
    auto p = parse_provenance(m);
    if (!p || *p == Provenance::Original) {
      throw ConfigError("unknown augmentation method '" + m + "'");
    }
    out.insert(*p);
  }
  return out;
}

std::set<AxisLabel> parse_axes(const std::string& csv) {
  std::set<AxisLabel> out;
  for (const std::string& raw : split(csv, ",")) {
    std::string a = trim(raw);
    if (a.empty()) continue;
    auto l = parse_axis_label(a);
    if (!l) throw ConfigError("unknown axis '" + a + "'");
    out.insert(*l);
  }
  return out;
}

PipelineConfig PipelineConfig::from_file(const std::string& path) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(e.what());
  }
  const fs::path base = fs::path(path).parent_path();
  auto resolve = [&](const std::string& p) {
    if (p.empty()) return p;
    fs::path fp(p);
    return (fp.is_absolute() ? fp : base / fp).lexically_normal().string();
  };

  PipelineConfig cfg;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ConfigError("key '" + section + "' outside of a section");
    }
    for (const auto& [key, node] : body) {
      const std::string value = trim(node.data());
      const std::string name = section + "." + key;
      if (section == "input") {
        if (key == "icd") cfg.input.icd = resolve(value);
        else if (key == "icd_format") cfg.input.icd_format = format_value(name, value);
        else if (key == "region_tree") cfg.input.region_tree = resolve(value);
        else if (key == "centers") cfg.input.centers = resolve(value);
        else if (key == "regions") cfg.input.regions = resolve(value);
        else if (key == "characteristics") cfg.input.characteristics = resolve(value);
        else if (key == "task_pairs") cfg.input.task_pairs = resolve(value);
        else if (key == "task_format") cfg.input.task_format = format_value(name, value);
        else if (key == "gold_delimiter") cfg.input.gold_delimiter = value;
        else if (key == "pretagged") cfg.input.pretagged = resolve(value);
        else if (key == "embeddings") cfg.input.embeddings = resolve(value);
        else throw ConfigError("unknown key " + name);
      } else if (section == "augment") {
        if (key == "methods") cfg.augment.enabled_methods = parse_methods(value);
        else if (key == "axes") cfg.augment.axes_for_replacement = parse_axes(value);
        else if (key == "max_pairs_per_source")
          cfg.augment.max_pairs_per_source = parse_number<std::size_t>(name, value);
        else throw ConfigError("unknown key " + name);
      } else if (section == "filter") {
        if (key == "alpha") cfg.alpha = parse_number<double>(name, value);
        else if (key == "beta") cfg.beta = parse_number<double>(name, value);
        else if (key == "ngm_mode") {
          try {
            cfg.ngm_mode = parse_ngm_mode(value);
          } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
          }
        } else if (key == "embedding_dimension")
          cfg.embedding_dimension = parse_number<std::size_t>(name, value);
        else throw ConfigError("unknown key " + name);
      } else if (section == "output") {
        if (key == "dir") cfg.output_dir = resolve(value);
        else if (key == "format") cfg.output_format = format_value(name, value);
        else throw ConfigError("unknown key " + name);
      } else if (section == "run") {
        if (key == "seed") cfg.seed = parse_number<std::uint64_t>(name, value);
        else if (key == "workers") cfg.workers = parse_number<std::size_t>(name, value);
        else throw ConfigError("unknown key " + name);
      } else {
        throw ConfigError("unknown section [" + section + "]");
      }
    }
  }
  return cfg;
}

void PipelineConfig::validate() const {
  auto require = [](const std::string& p, const std::string& what) {
    if (p.empty()) throw ConfigError("missing required path: " + what);
    if (!fs::exists(p)) throw ConfigError(what + " does not exist: " + p);
  };
  auto optional = [](const std::string& p, const std::string& what) {
    if (!p.empty() && !fs::exists(p)) {
      throw ConfigError(what + " does not exist: " + p);
    }
  };
  require(input.icd, "input.icd");
  require(input.task_pairs, "input.task_pairs");
  const auto& methods = augment.enabled_methods;
  bool needs_tags = methods.count(Provenance::AR1) || methods.count(Provenance::AR2) ||
                    methods.count(Provenance::MgaRegion);
  bool any_lexicon = !input.centers.empty() || !input.regions.empty() ||
                     !input.characteristics.empty();
  if (needs_tags && input.pretagged.empty() && !any_lexicon) {
    throw ConfigError("AR/MGA-Region need lexicons or a pretagged file");
  }
  if (any_lexicon) {
    require(input.centers, "input.centers");
    require(input.regions, "input.regions");
    require(input.characteristics, "input.characteristics");
  }
  if (methods.count(Provenance::MgaRegion)) {
    require(input.region_tree, "input.region_tree");
  } else {
    optional(input.region_tree, "input.region_tree");
  }
  optional(input.pretagged, "input.pretagged");
  optional(input.embeddings, "input.embeddings");
  if (input.gold_delimiter.empty()) throw ConfigError("empty gold_delimiter");
  if (augment.max_pairs_per_source < 1) {
    throw ConfigError("max_pairs_per_source must be >= 1");
  }
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be >= 0");
  if (!(beta >= -1.0 && beta <= 1.0)) throw ConfigError("beta must lie in [-1, 1]");
  if (embedding_dimension == 0) throw ConfigError("embedding_dimension must be > 0");
  if (workers == 0) throw ConfigError("workers must be >= 1");
  if (output_dir.empty()) throw ConfigError("missing output dir");
}

// ---------------------------------------------------------------------------

std::size_t ProvenanceStats::dropped_total() const {
  std::size_t n = 0;
  for (const auto& [reason, count] : dropped) n += count;
  return n;
}

bool RunStats::conserved() const {
  for (const auto& [prov, s] : by_provenance) {
    if (s.generated != s.kept + s.dropped_total() + s.dedup_removed) return false;
  }
  return true;
}

std::string RunStats::to_text() const {
  std::ostringstream out;
  out << "provenance\tgenerated\tdropped\tdedup_removed\tkept\n";
  std::size_t gen = 0, drop = 0, dup = 0, kept = 0;
  for (const auto& [prov, s] : by_provenance) {
    out << to_string(prov) << '\t' << s.generated << '\t' << s.dropped_total()
        << '\t' << s.dedup_removed << '\t' << s.kept << '\n';
    gen += s.generated;
    drop += s.dropped_total();
    dup += s.dedup_removed;
    kept += s.kept;
  }
  out << "total\t" << gen << '\t' << drop << '\t' << dup << '\t' << kept << '\n';
  std::map<std::string, std::size_t> reasons;
  for (const auto& [prov, s] : by_provenance) {
    for (const auto& [r, n] : s.dropped) reasons[r] += n;
  }
  for (const auto& [r, n] : reasons) out << "dropped." << r << '\t' << n << '\n';
  return out.str();
}

RunResult run(const PipelineConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();

  IcdVocabulary vocab = load_icd(cfg.input.icd, cfg.input.icd_format);
  std::vector<NormPair> task = load_task_pairs(
      cfg.input.task_pairs, cfg.input.task_format, cfg.input.gold_delimiter);
  RegionTree tree;
  if (!cfg.input.region_tree.empty()) tree = load_region_tree(cfg.input.region_tree);

  std::shared_ptr<const Tagger> tagger;
  if (!cfg.input.centers.empty()) {
    AxisLexicons lex = load_lexicons(cfg.input.centers, cfg.input.regions,
                                     cfg.input.characteristics);
    if (lex.centers.empty()) throw InputError(cfg.input.centers, 0, "empty lexicon");
    if (lex.regions.empty()) throw InputError(cfg.input.regions, 0, "empty lexicon");
    if (lex.characteristics.empty()) {
      throw InputError(cfg.input.characteristics, 0, "empty lexicon");
    }
    tagger = std::make_shared<LexiconTagger>(lex);
  }
  if (!cfg.input.pretagged.empty()) {
    tagger = std::make_shared<PretaggedTagger>(load_pretagged(cfg.input.pretagged),
                                               tagger);
  }
  if (!tagger) tagger = std::make_shared<PretaggedTagger>(std::vector<TaggedTerm>{});

  AugConfig aug = cfg.augment;
  aug.rng_seed = cfg.seed;
  aug.workers = cfg.workers;

  FilterConfig filt;
  filt.alpha = cfg.alpha;
  filt.beta = cfg.beta;
  filt.ngm_mode = cfg.ngm_mode;
  filt.workers = cfg.workers;
  if (!cfg.input.embeddings.empty()) {
    filt.embedder = std::make_shared<VectorFileEmbedder>(
        VectorFileEmbedder::load(cfg.input.embeddings));
  } else {
    filt.embedder = std::make_shared<HashedNgramEmbedder>(cfg.embedding_dimension);
  }

  const auto& methods = aug.enabled_methods;
  std::vector<NormPair> all = task;
  if (!methods.empty()) {
    TaggedIndex idx = build_index(vocab, task, *tagger, cfg.workers);
    auto append = [&all](std::vector<NormPair> v) {
      std::move(v.begin(), v.end(), std::back_inserter(all));
    };
    if (methods.count(Provenance::AR1)) append(ar1(vocab, idx, aug));
    if (methods.count(Provenance::AR2)) append(ar2(task, vocab, idx, aug));
    if (methods.count(Provenance::MgaCode)) append(mga_code(vocab));
    if (methods.count(Provenance::MgaRegion)) append(mga_region(vocab, idx, tree));
  }

  RunStats stats;
  stats.by_provenance[Provenance::Original];
  for (Provenance p : methods) stats.by_provenance[p];
  for (const NormPair& p : all) ++stats.by_provenance[p.provenance].generated;

  FilterResult filtered = filter_pairs(all, filt);
  for (const auto& [prov, reasons] : filtered.dropped_by_provenance) {
    stats.by_provenance[prov].dropped = reasons;
  }
  DedupeResult deduped = dedupe_with_stats(filtered.kept);
  for (const auto& [prov, n] : deduped.removed) {
    stats.by_provenance[prov].dedup_removed = n;
  }

  RunResult result;
  result.dataset = std::move(deduped.pairs);
  std::sort(result.dataset.begin(), result.dataset.end(), canonical_less);
  for (const NormPair& p : result.dataset) ++stats.by_provenance[p.provenance].kept;

  std::vector<NormPair> augmented;
  std::vector<NormPair> original;
  for (const NormPair& p : result.dataset) {
    (p.provenance == Provenance::Original ? original : augmented).push_back(p);
  }

  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) throw InputError(cfg.output_dir, 0, "cannot create output directory");
  const std::string ext = cfg.output_format == FileFormat::TSV ? ".tsv" : ".jsonl";
  const fs::path dir(cfg.output_dir);
  result.dataset_path = (dir / ("dataset" + ext)).string();
  result.augmented_path = (dir / ("augmented" + ext)).string();
  result.original_path = (dir / ("original" + ext)).string();
  write_dataset(result.dataset, result.dataset_path, cfg.output_format);
  write_dataset(augmented, result.augmented_path, cfg.output_format);
  write_dataset(original, result.original_path, cfg.output_format);

  stats.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  result.stats = std::move(stats);
  return result;
}

}  // namespace dxaug
