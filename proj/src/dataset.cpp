#include "dxaug/dataset.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "dxaug/errors.hpp"

namespace dxaug {

namespace {

std::string shortest(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf, ptr);
}

double parse_double(const std::string& s, const std::string& source,
                    std::size_t lineno) {
  double x = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw InputError(source, lineno, "bad number '" + s + "'");
  }
  return x;
}

Provenance parse_prov(const std::string& s, const std::string& source,
                      std::size_t lineno) {
  auto p = parse_provenance(s);
  if (!p) throw InputError(source, lineno, "unknown provenance '" + s + "'");
  return *p;
}

TermText term(const std::string& s, const std::string& source,
              std::size_t lineno) {
  try {
    return TermText(s);
  } catch (const std::invalid_argument& e) {
    throw InputError(source, lineno, e.what());
  }
}

}  // namespace

void write_dataset(std::ostream& out, const std::vector<NormPair>& pairs,
                   FileFormat format) {
  for (const NormPair& p : pairs) {
    if (format == FileFormat::TSV) {
      out << p.unnormalized.raw() << '\t' << p.standard.raw() << '\t'
          << p.standard_code.value_or("") << '\t' << to_string(p.provenance)
          << '\t';
      if (p.scores) out << shortest(p.scores->ngm) << '\t' << shortest(p.scores->cos);
      else out << '\t';
      out << '\n';
    } else {
      nlohmann::ordered_json j;
      j["unnormalized"] = p.unnormalized.raw();
      j["standard"] = p.standard.raw();
      j["standard_code"] = p.standard_code ? nlohmann::ordered_json(*p.standard_code)
                                           : nlohmann::ordered_json(nullptr);
      j["provenance"] = std::string(to_string(p.provenance));
      j["ngm"] = p.scores ? nlohmann::ordered_json(p.scores->ngm)
                          : nlohmann::ordered_json(nullptr);
      j["cos"] = p.scores ? nlohmann::ordered_json(p.scores->cos)
                          : nlohmann::ordered_json(nullptr);
      out << j.dump() << '\n';
    }
  }
}

void write_dataset(const std::vector<NormPair>& pairs, const std::string& path,
                   FileFormat format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError(path, 0, "cannot open for writing");
  write_dataset(out, pairs, format);
  out.flush();
  if (!out) throw InputError(path, 0, "write failed");
}

std::vector<NormPair> read_dataset(std::istream& in, FileFormat format,
                                   const std::string& source) {
  std::vector<NormPair> out;
  for (auto& [lineno, line] : read_record_lines(in)) {
    if (format == FileFormat::TSV) {
      auto f = split(line, "\t");
      if (f.size() != 6) throw InputError(source, lineno, "expected 6 columns");
      NormPair p{term(f[0], source, lineno), term(f[1], source, lineno),
                 std::nullopt, parse_prov(f[3], source, lineno), std::nullopt};
      if (!f[2].empty()) p.standard_code = f[2];
      if (!f[4].empty() || !f[5].empty()) {
        p.scores = FilterScores{parse_double(f[4], source, lineno),
                                parse_double(f[5], source, lineno)};
      }
      out.push_back(std::move(p));
    } else {
      try {
        auto j = nlohmann::json::parse(line);
        NormPair p{term(j.at("unnormalized").get<std::string>(), source, lineno),
                   term(j.at("standard").get<std::string>(), source, lineno),
                   std::nullopt,
                   parse_prov(j.at("provenance").get<std::string>(), source, lineno),
                   std::nullopt};
        if (j.contains("standard_code") && !j["standard_code"].is_null()) {
          p.standard_code = j["standard_code"].get<std::string>();
        }
        bool has_ngm = j.contains("ngm") && !j["ngm"].is_null();
        bool has_cos = j.contains("cos") && !j["cos"].is_null();
        if (has_ngm != has_cos) {
          throw InputError(source, lineno, "ngm and cos must appear together");
        }
        if (has_ngm) {
          p.scores = FilterScores{j["ngm"].get<double>(), j["cos"].get<double>()};
        }
        out.push_back(std::move(p));
      } catch (const nlohmann::json::exception& e) {
        throw InputError(source, lineno, std::string("malformed record: ") + e.what());
      }
    }
  }
  return out;
}

std::vector<NormPair> read_dataset(const std::string& path, FileFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path, 0, "cannot open file");
  return read_dataset(in, format, path);
}

FileFormat format_from_path(const std::string& path) {
  if (path.ends_with(".jsonl") || path.ends_with(".json")) return FileFormat::JSONL;
  return FileFormat::TSV;
}

DedupeResult dedupe_with_stats(const std::vector<NormPair>& pairs) {
  struct KeyHash {
    std::size_t operator()(const std::pair<std::string, std::string>& k) const {
      return std::hash<std::string>()(k.first) * 31 ^
             std::hash<std::string>()(k.second);
    }
  };
  std::unordered_map<std::pair<std::string, std::string>, std::size_t, KeyHash>
      winner;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const NormPair& p = pairs[i];
    auto [it, fresh] =
        winner.emplace(std::make_pair(p.unnormalized.raw(), p.standard.raw()), i);
    if (fresh) continue;
    const NormPair& cur = pairs[it->second];
    int pp = priority(p.provenance);
    int pc = priority(cur.provenance);
    if (pp > pc || (pp == pc && canonical_less(p, cur))) it->second = i;
  }
  DedupeResult out;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const NormPair& p = pairs[i];
    if (winner.at({p.unnormalized.raw(), p.standard.raw()}) == i) {
      out.pairs.push_back(p);
    } else {
      ++out.removed[p.provenance];
    }
  }
  return out;
}

std::vector<NormPair> dedupe(const std::vector<NormPair>& pairs) {
  return dedupe_with_stats(pairs).pairs;
}

}  // namespace dxaug
