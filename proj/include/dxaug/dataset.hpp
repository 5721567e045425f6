#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "dxaug/vocab.hpp"

namespace dxaug {

// Columns: unnormalized, standard, standard_code, provenance, ngm, cos.
// TSV leaves absent values empty; JSONL writes null. No header line.
void write_dataset(std::ostream& out, const std::vector<NormPair>& pairs,
                   FileFormat format);
void write_dataset(const std::vector<NormPair>& pairs, const std::string& path,
                   FileFormat format);

std::vector<NormPair> read_dataset(std::istream& in, FileFormat format,
                                   const std::string& source = "");
std::vector<NormPair> read_dataset(const std::string& path, FileFormat format);

// ".jsonl"/".json" -> JSONL, anything else -> TSV.
FileFormat format_from_path(const std::string& path);

struct DedupeResult {
  std::vector<NormPair> pairs;
  std::map<Provenance, std::size_t> removed;
};

// Collapses pairs with equal (unnormalized, standard) to the one with the
// highest provenance priority (ties: canonically smallest). Survivors keep
// their input order.
DedupeResult dedupe_with_stats(const std::vector<NormPair>& pairs);
std::vector<NormPair> dedupe(const std::vector<NormPair>& pairs);

}  // namespace dxaug
