#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dxaug/text.hpp"

namespace dxaug {

enum class FileFormat { TSV, JSONL };

FileFormat parse_format(std::string_view name);  // "tsv" | "jsonl"
std::string_view to_string(FileFormat f);

// ---------------------------------------------------------------------------
// Normalization pairs

// Declared in canonical output order, which is also the lexicographic order
// of the wire names.
enum class Provenance { AR1, AR2, MgaCode, MgaRegion, Original };

std::string_view to_string(Provenance p);  // "ar1", "ar2", "mga-code", ...
std::optional<Provenance> parse_provenance(std::string_view name);

// Dedupe priority: Original > AR2 > AR1 > MgaCode > MgaRegion.
int priority(Provenance p);

struct FilterScores {
  double ngm = 0.0;
  double cos = 0.0;
  bool operator==(const FilterScores&) const = default;
};

struct NormPair {
  TermText unnormalized;
  TermText standard;
  std::optional<std::string> standard_code;
  Provenance provenance = Provenance::Original;
  std::optional<FilterScores> scores;

  bool operator==(const NormPair&) const = default;
};

// Orders by (provenance, unnormalized, standard, standard_code).
bool canonical_less(const NormPair& a, const NormPair& b);

// ---------------------------------------------------------------------------
// Coded vocabulary

enum class Granularity { FourDigit, SixDigit };

// Shape of a code by its count of ASCII alphanumerics: 4 is FourDigit
// ("A18.2"), 6 or more is SixDigit ("A18.201", "A15.000x001"). Anything else
// is not a supported code.
std::optional<Granularity> granularity_of(std::string_view code);

struct IcdEntry {
  std::string code;
  TermText name;
  Granularity granularity;
};

/// Immutable coded vocabulary with a prefix-defined hierarchy.
///
/// A SixDigit entry's parent is the FourDigit entry whose code is a string
/// prefix of its own. Entries are kept sorted by code.
class IcdVocabulary {
 public:
  IcdVocabulary() = default;

  // Throws std::invalid_argument on duplicate codes or on a SixDigit code
  // matched by more than one FourDigit prefix.
  explicit IcdVocabulary(std::vector<IcdEntry> entries);

  const std::vector<IcdEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  const IcdEntry* find(std::string_view code) const;

  // Parent of a SixDigit entry, or nullptr.
  const IcdEntry* parent_of(std::string_view code) const;

  // Codes of all entries carrying exactly this (normalized) name.
  std::vector<std::string> codes_for_name(std::string_view name) const;

  // Number of FourDigit entries that have at least one child.
  std::size_t parent_count() const { return children_.size(); }

  friend std::vector<IcdEntry> children_of(const IcdVocabulary& vocab,
                                           std::string_view code4);

 private:
  std::vector<IcdEntry> entries_;
  std::unordered_map<std::string, std::size_t> by_code_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_name_;
  std::unordered_map<std::string, std::vector<std::size_t>> children_;
  std::unordered_map<std::string, std::size_t> parent_;
};

// SixDigit children of a FourDigit code, ascending by code. Unknown codes
// produce a warning and an empty result.
std::vector<IcdEntry> children_of(const IcdVocabulary& vocab,
                                  std::string_view code4);

IcdVocabulary read_icd(std::istream& in, FileFormat format,
                       const std::string& source = "");
IcdVocabulary load_icd(const std::string& path, FileFormat format);
void write_icd(std::ostream& out, const IcdVocabulary& vocab,
               FileFormat format);

// ---------------------------------------------------------------------------
// Anatomical region hierarchy

class RegionTree {
 public:
  RegionTree() = default;

  // Adds child -> parent. Throws std::invalid_argument if the edge closes a
  // cycle or gives child a second, different parent. Repeating an existing
  // edge is a no-op.
  void add_edge(const std::string& child, const std::string& parent);

  bool contains(std::string_view node) const;
  std::optional<std::string> parent(std::string_view node) const;
  // Nearest first.
  std::vector<std::string> ancestors(std::string_view node) const;
  const std::set<std::string, std::less<>>& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }

 private:
  std::set<std::string, std::less<>> nodes_;
  std::map<std::string, std::string, std::less<>> parent_;
};

// True iff big is a strict ancestor of small. Unknown nodes give false.
bool is_ancestor_region(const RegionTree& tree, std::string_view big,
                        std::string_view small);

RegionTree read_region_tree(std::istream& in, const std::string& source = "");
RegionTree load_region_tree(const std::string& path);

// ---------------------------------------------------------------------------
// Axis-word lexicons

struct AxisLexicons {
  std::set<std::string> centers;
  std::set<std::string> regions;
  std::set<std::string> characteristics;

  bool any_empty() const {
    return centers.empty() || regions.empty() || characteristics.empty();
  }
};

std::set<std::string> read_lexicon(std::istream& in,
                                   const std::string& source = "");
AxisLexicons load_lexicons(const std::string& centers_path,
                           const std::string& regions_path,
                           const std::string& characteristics_path);

// ---------------------------------------------------------------------------
// Seed normalization dataset

inline constexpr std::string_view kDefaultGoldDelimiter = "##";

// One Original pair per (unnormalized, gold standard). TSV records are
// `unnormalized<TAB>gold1##gold2[<TAB>code1##code2]`; JSONL records carry
// "unnormalized"/"standard"/"code" (or "text"/"normalized_result").
std::vector<NormPair> read_task_pairs(
    std::istream& in, FileFormat format, const std::string& source = "",
    std::string_view delimiter = kDefaultGoldDelimiter);
std::vector<NormPair> load_task_pairs(
    const std::string& path, FileFormat format,
    std::string_view delimiter = kDefaultGoldDelimiter);

// Lines of a text file with CR and a leading BOM stripped, paired with their
// 1-based line number. Whitespace-only lines are skipped.
std::vector<std::pair<std::size_t, std::string>> read_record_lines(
    std::istream& in);

}  // namespace dxaug
