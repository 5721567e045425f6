#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dxaug/augment.hpp"
#include "dxaug/filter.hpp"
#include "dxaug/vocab.hpp"

namespace dxaug {

struct InputPaths {
  std::string icd;
  FileFormat icd_format = FileFormat::TSV;
  std::string region_tree;  // optional unless mga-region is enabled
  std::string centers;
  std::string regions;
  std::string characteristics;
  std::string task_pairs;
  FileFormat task_format = FileFormat::TSV;
  std::string gold_delimiter = std::string(kDefaultGoldDelimiter);
  std::string pretagged;   // optional
  std::string embeddings;  // optional; replaces the hashed embedder
};

/// Everything needed for one reproducible augmentation run.
///
/// The config file is INI-style with sections [input], [augment], [filter],
/// [output] and [run]; every key has a matching CLI flag that overrides it.
/// Relative paths in the file resolve against the file's directory.
struct PipelineConfig {
  InputPaths input;
  AugConfig augment;
  double alpha = 0.7;
  double beta = 0.8;
  NgmMode ngm_mode = NgmMode::Multiset;
  std::size_t embedding_dimension = 256;
  std::string output_dir = "out";
  FileFormat output_format = FileFormat::JSONL;
  std::uint64_t seed = 0;
  std::size_t workers = 1;

  static PipelineConfig from_file(const std::string& path);

  // Throws ConfigError on missing required paths, paths that do not exist,
  // and out-of-range values.
  void validate() const;
};

std::set<Provenance> parse_methods(const std::string& csv);
std::set<AxisLabel> parse_axes(const std::string& csv);

struct ProvenanceStats {
  std::size_t generated = 0;
  std::map<std::string, std::size_t> dropped;
  std::size_t dedup_removed = 0;
  std::size_t kept = 0;

  std::size_t dropped_total() const;
  bool operator==(const ProvenanceStats&) const = default;
};

struct RunStats {
  std::map<Provenance, ProvenanceStats> by_provenance;
  double wall_seconds = 0.0;

  // generated == kept + dropped + dedup_removed for every provenance.
  bool conserved() const;
  std::string to_text() const;
};

struct RunResult {
  RunStats stats;
  std::vector<NormPair> dataset;  // canonical order
  std::string dataset_path;
  std::string augmented_path;
  std::string original_path;
};

// load -> tag -> generate -> filter -> dedupe -> sort -> write.
// Writes dataset.<ext> (everything), augmented.<ext> (generated pairs only,
// the pretraining pool) and original.<ext> into cfg.output_dir.
RunResult run(const PipelineConfig& cfg);

}  // namespace dxaug
