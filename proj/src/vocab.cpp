#include "dxaug/vocab.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "dxaug/errors.hpp"
#include "dxaug/log.hpp"

namespace dxaug {

using nlohmann::json;

FileFormat parse_format(std::string_view name) {
  if (name == "tsv" || name == "TSV") return FileFormat::TSV;
  if (name == "jsonl" || name == "JSONL") return FileFormat::JSONL;
  throw std::invalid_argument("unknown format: " + std::string(name));
}

std::string_view to_string(FileFormat f) {
  return f == FileFormat::TSV ? "tsv" : "jsonl";
}

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::AR1: return "ar1";
    case Provenance::AR2: return "ar2";
    case Provenance::MgaCode: return "mga-code";
    case Provenance::MgaRegion: return "mga-region";
    case Provenance::Original: return "original";
  }
  return "?";
}

std::optional<Provenance> parse_provenance(std::string_view name) {
  for (Provenance p : {Provenance::AR1, Provenance::AR2, Provenance::MgaCode,
                       Provenance::MgaRegion, Provenance::Original}) {
    if (name == to_string(p)) return p;
  }
  return std::nullopt;
}

int priority(Provenance p) {
  switch (p) {
    case Provenance::Original: return 4;
    case Provenance::AR2: return 3;
    case Provenance::AR1: return 2;
    case Provenance::MgaCode: return 1;
    case Provenance::MgaRegion: return 0;
  }
  return -1;
}

bool canonical_less(const NormPair& a, const NormPair& b) {
  if (a.provenance != b.provenance) return a.provenance < b.provenance;
  if (a.unnormalized != b.unnormalized) return a.unnormalized < b.unnormalized;
  if (a.standard != b.standard) return a.standard < b.standard;
  return a.standard_code.value_or("") < b.standard_code.value_or("");
}

std::vector<std::pair<std::size_t, std::string>> read_record_lines(
    std::istream& in) {
  std::vector<std::pair<std::size_t, std::string>> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    bool blank = std::all_of(line.begin(), line.end(), [](unsigned char c) {
      return std::isspace(c) != 0;
    });
    if (!blank) out.emplace_back(lineno, std::move(line));
  }
  return out;
}

namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path, 0, "cannot open file");
  return in;
}

// Normalizes one field, mapping text errors onto the record's location.
TermText term_field(std::string_view raw, const std::string& source,
                    std::size_t line, std::string_view what) {
  try {
    return TermText(raw);
  } catch (const std::invalid_argument& e) {
    throw InputError(source, line, std::string(what) + ": " + e.what());
  }
}

json parse_json_line(const std::string& line, const std::string& source,
                     std::size_t lineno) {
  try {
    json j = json::parse(line);
    if (!j.is_object()) throw InputError(source, lineno, "expected object");
    return j;
  } catch (const json::exception& e) {
    throw InputError(source, lineno, std::string("malformed JSON: ") + e.what());
  }
}

std::string json_string(const json& j, std::initializer_list<const char*> keys,
                        const std::string& source, std::size_t lineno) {
  for (const char* k : keys) {
    auto it = j.find(k);
    if (it == j.end()) continue;
    if (!it->is_string()) {
      throw InputError(source, lineno, std::string("field '") + k +
                                           "' must be a string");
    }
    return it->get<std::string>();
  }
  throw InputError(source, lineno,
                   std::string("missing field '") + *keys.begin() + "'");
}

}  // namespace

// ---------------------------------------------------------------------------

std::optional<Granularity> granularity_of(std::string_view code) {
  std::size_t alnum = 0;
  for (unsigned char c : code) {
    if (std::isalnum(c)) ++alnum;
  }
  if (alnum == 4) return Granularity::FourDigit;
  if (alnum >= 6) return Granularity::SixDigit;
  return std::nullopt;
}

IcdVocabulary::IcdVocabulary(std::vector<IcdEntry> entries)
    : entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end(),
            [](const IcdEntry& a, const IcdEntry& b) { return a.code < b.code; });
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const IcdEntry& e = entries_[i];
    if (!by_code_.emplace(e.code, i).second) {
      throw std::invalid_argument("duplicate code " + e.code);
    }
    by_name_[e.name.raw()].push_back(i);
  }
  // Sorted codes put every code4-prefixed code in one contiguous run right
  // after code4 itself.
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const IcdEntry& p = entries_[i];
    if (p.granularity != Granularity::FourDigit) continue;
    for (std::size_t j = i + 1;
         j < entries_.size() && entries_[j].code.starts_with(p.code); ++j) {
      if (entries_[j].granularity != Granularity::SixDigit) continue;
      auto [it, fresh] = parent_.emplace(entries_[j].code, i);
      if (!fresh && it->second != i) {
        throw std::invalid_argument("code " + entries_[j].code +
                                    " has two parents: " +
                                    entries_[it->second].code + ", " + p.code);
      }
      children_[p.code].push_back(j);
    }
  }
}

const IcdEntry* IcdVocabulary::find(std::string_view code) const {
  auto it = by_code_.find(std::string(code));
  return it == by_code_.end() ? nullptr : &entries_[it->second];
}

const IcdEntry* IcdVocabulary::parent_of(std::string_view code) const {
  auto it = parent_.find(std::string(code));
  return it == parent_.end() ? nullptr : &entries_[it->second];
}

std::vector<std::string> IcdVocabulary::codes_for_name(
    std::string_view name) const {
  std::vector<std::string> out;
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) return out;
  for (std::size_t i : it->second) out.push_back(entries_[i].code);
  return out;
}

std::vector<IcdEntry> children_of(const IcdVocabulary& vocab,
                                  std::string_view code4) {
  std::vector<IcdEntry> out;
  const IcdEntry* e = vocab.find(code4);
  if (e == nullptr || e->granularity != Granularity::FourDigit) {
    warn("children_of: '" + std::string(code4) +
         "' is not a FourDigit code in the vocabulary");
    return out;
  }
  auto it = vocab.children_.find(std::string(code4));
  if (it == vocab.children_.end()) return out;
  for (std::size_t i : it->second) out.push_back(vocab.entries_[i]);
  return out;
}

IcdVocabulary read_icd(std::istream& in, FileFormat format,
                       const std::string& source) {
  std::vector<IcdEntry> entries;
  std::unordered_map<std::string, std::size_t> seen;
  for (auto& [lineno, line] : read_record_lines(in)) {
    std::string code;
    std::string name;
    if (format == FileFormat::TSV) {
      auto fields = split(line, "\t");
      if (fields.size() != 2) {
        throw InputError(source, lineno, "expected code<TAB>name");
      }
      code = std::move(fields[0]);
      name = std::move(fields[1]);
    } else {
      json j = parse_json_line(line, source, lineno);
      code = json_string(j, {"code"}, source, lineno);
      name = json_string(j, {"name"}, source, lineno);
    }
    // Codes are identifiers; surrounding whitespace is not significant.
    while (!code.empty() && std::isspace(static_cast<unsigned char>(code.back())))
      code.pop_back();
    code.erase(0, code.find_first_not_of(" \t"));
    if (code.empty()) throw InputError(source, lineno, "empty code");
    auto granularity = granularity_of(code);
    if (!granularity) {
      throw InputError(source, lineno,
                       "unsupported code shape '" + code +
                           "' (need 4 or at least 6 alphanumerics)");
    }
    if (normalize_text(name).empty()) {
      throw InputError(source, lineno, "empty name");
    }
    if (auto [it, fresh] = seen.emplace(code, lineno); !fresh) {
      throw InputError(source, lineno,
                       "duplicate code " + code + " (first at line " +
                           std::to_string(it->second) + ")");
    }
    entries.push_back(
        IcdEntry{code, term_field(name, source, lineno, "name"), *granularity});
  }
  try {
    return IcdVocabulary(std::move(entries));
  } catch (const std::invalid_argument& e) {
    throw InputError(source, 0, e.what());
  }
}

IcdVocabulary load_icd(const std::string& path, FileFormat format) {
  auto in = open_input(path);
  return read_icd(in, format, path);
}

void write_icd(std::ostream& out, const IcdVocabulary& vocab,
               FileFormat format) {
  for (const IcdEntry& e : vocab.entries()) {
    if (format == FileFormat::TSV) {
      out << e.code << '\t' << e.name.raw() << '\n';
    } else {
      nlohmann::ordered_json j;
      j["code"] = e.code;
      j["name"] = e.name.raw();
      out << j.dump() << '\n';
    }
  }
}

// ---------------------------------------------------------------------------

void RegionTree::add_edge(const std::string& child, const std::string& parent) {
  if (child.empty() || parent.empty()) {
    throw std::invalid_argument("empty region name");
  }
  if (child == parent) throw std::invalid_argument("cycle: " + child);
  auto existing = parent_.find(child);
  if (existing != parent_.end()) {
    if (existing->second == parent) return;
    throw std::invalid_argument("region '" + child + "' has two parents: '" +
                                existing->second + "' and '" + parent + "'");
  }
  for (std::string_view up : ancestors(parent)) {
    if (up == child) {
      throw std::invalid_argument("cycle through '" + child + "' and '" +
                                  parent + "'");
    }
  }
  nodes_.insert(child);
  nodes_.insert(parent);
  parent_.emplace(child, parent);
}

bool RegionTree::contains(std::string_view node) const {
  return nodes_.find(node) != nodes_.end();
}

std::optional<std::string> RegionTree::parent(std::string_view node) const {
  auto it = parent_.find(node);
  if (it == parent_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> RegionTree::ancestors(std::string_view node) const {
  std::vector<std::string> out;
  auto it = parent_.find(node);
  while (it != parent_.end()) {
    out.push_back(it->second);
    it = parent_.find(it->second);
  }
  return out;
}

bool is_ancestor_region(const RegionTree& tree, std::string_view big,
                        std::string_view small) {
  if (big == small) return false;
  for (const std::string& a : tree.ancestors(small)) {
    if (a == big) return true;
  }
  return false;
}

RegionTree read_region_tree(std::istream& in, const std::string& source) {
  RegionTree tree;
  for (auto& [lineno, line] : read_record_lines(in)) {
    auto fields = split(line, "\t");
    if (fields.size() != 2) {
      throw InputError(source, lineno, "expected child<TAB>parent");
    }
    try {
      tree.add_edge(normalize_text(fields[0]), normalize_text(fields[1]));
    } catch (const std::invalid_argument& e) {
      throw InputError(source, lineno, e.what());
    }
  }
  return tree;
}

RegionTree load_region_tree(const std::string& path) {
  auto in = open_input(path);
  return read_region_tree(in, path);
}

// ---------------------------------------------------------------------------

std::set<std::string> read_lexicon(std::istream& in,
                                   const std::string& source) {
  std::set<std::string> out;
  for (auto& [lineno, line] : read_record_lines(in)) {
    try {
      std::string entry = normalize_text(line);
      if (!entry.empty()) out.insert(std::move(entry));
    } catch (const std::invalid_argument& e) {
      throw InputError(source, lineno, e.what());
    }
  }
  return out;
}

AxisLexicons load_lexicons(const std::string& centers_path,
                           const std::string& regions_path,
                           const std::string& characteristics_path) {
  AxisLexicons lex;
  auto load = [](const std::string& path) {
    auto in = open_input(path);
    return read_lexicon(in, path);
  };
  lex.centers = load(centers_path);
  lex.regions = load(regions_path);
  lex.characteristics = load(characteristics_path);
  return lex;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> split_golds(const std::string& field,
                                     std::string_view delimiter,
                                     const std::string& source,
                                     std::size_t lineno) {
  auto parts = split(field, delimiter);
  for (const std::string& p : parts) {
    if (normalize_text(p).empty()) {
      throw InputError(source, lineno, "empty field");
    }
    // A leftover fragment of the delimiter means the record uses a
    // separator other than the declared one.
    for (char c : delimiter) {
      if (p.find(c) != std::string::npos) {
        throw InputError(source, lineno,
                         "undeclared delimiter characters in '" + p + "'");
      }
    }
  }
  return parts;
}

std::vector<std::string> json_string_list(const json& j,
                                          std::initializer_list<const char*> keys,
                                          std::string_view delimiter,
                                          const std::string& source,
                                          std::size_t lineno, bool required) {
  for (const char* k : keys) {
    auto it = j.find(k);
    if (it == j.end() || it->is_null()) continue;
    if (it->is_string()) {
      return split_golds(it->get<std::string>(), delimiter, source, lineno);
    }
    if (it->is_array()) {
      std::vector<std::string> out;
      for (const json& v : *it) {
        if (!v.is_string()) {
          throw InputError(source, lineno,
                           std::string("field '") + k + "' must hold strings");
        }
        auto parts =
            split_golds(v.get<std::string>(), delimiter, source, lineno);
        out.insert(out.end(), parts.begin(), parts.end());
      }
      if (out.empty()) throw InputError(source, lineno, "empty field");
      return out;
    }
    throw InputError(source, lineno,
                     std::string("field '") + k + "' has the wrong type");
  }
  if (required) {
    throw InputError(source, lineno,
                     std::string("missing field '") + *keys.begin() + "'");
  }
  return {};
}

}  // namespace

std::vector<NormPair> read_task_pairs(std::istream& in, FileFormat format,
                                      const std::string& source,
                                      std::string_view delimiter) {
  if (delimiter.empty()) throw std::invalid_argument("empty gold delimiter");
  std::vector<NormPair> out;
  for (auto& [lineno, line] : read_record_lines(in)) {
    std::string unnormalized;
    std::vector<std::string> golds;
    std::vector<std::string> codes;
    if (format == FileFormat::TSV) {
      auto fields = split(line, "\t");
      if (fields.size() < 2 || fields.size() > 3) {
        throw InputError(source, lineno,
                         "expected unnormalized<TAB>standards[<TAB>codes]");
      }
      unnormalized = fields[0];
      golds = split_golds(fields[1], delimiter, source, lineno);
      if (fields.size() == 3) {
        codes = split_golds(fields[2], delimiter, source, lineno);
      }
    } else {
      json j = parse_json_line(line, source, lineno);
      unnormalized = json_string(j, {"unnormalized", "text"}, source, lineno);
      golds = json_string_list(j, {"standard", "normalized_result"}, delimiter,
                               source, lineno, true);
      codes = json_string_list(j, {"code", "standard_code"}, delimiter, source,
                               lineno, false);
    }
    if (!codes.empty() && codes.size() != golds.size()) {
      throw InputError(source, lineno,
                       "code count does not match standard count");
    }
    TermText u = term_field(unnormalized, source, lineno, "unnormalized");
    for (std::size_t i = 0; i < golds.size(); ++i) {
      NormPair p{u, term_field(golds[i], source, lineno, "standard"),
                 std::nullopt, Provenance::Original, std::nullopt};
      if (!codes.empty()) p.standard_code = normalize_text(codes[i]);
      out.push_back(std::move(p));
    }
  }
  return out;
}

std::vector<NormPair> load_task_pairs(const std::string& path,
                                      FileFormat format,
                                      std::string_view delimiter) {
  auto in = open_input(path);
  return read_task_pairs(in, format, path, delimiter);
}

}  // namespace dxaug
