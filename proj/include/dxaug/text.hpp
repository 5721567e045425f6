#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace dxaug {

// NFKC-normalizes UTF-8 text and trims Unicode whitespace on both ends.
// Throws std::invalid_argument on ill-formed UTF-8. The result may be empty.
std::string normalize_text(std::string_view utf8);

std::u32string utf8_to_u32(std::string_view utf8);
std::string u32_to_utf8(std::u32string_view cps);

// Splits on an exact separator; keeps empty fields.
std::vector<std::string> split(std::string_view s, std::string_view sep);

/// A normalized disease-name string indexed by code point.
///
/// Construction applies NFKC and trims whitespace; an empty result is
/// rejected. All offsets and lengths are in Unicode scalar values.
class TermText {
 public:
  explicit TermText(std::string_view utf8);

  const std::string& raw() const { return raw_; }
  const std::u32string& codepoints() const { return cps_; }
  std::size_t length() const { return cps_.size(); }

  // UTF-8 of code points [start, end).
  std::string substr(std::size_t start, std::size_t end) const;

  bool operator==(const TermText& o) const { return raw_ == o.raw_; }
  std::strong_ordering operator<=>(const TermText& o) const {
    return raw_ <=> o.raw_;
  }

 private:
  std::string raw_;
  std::u32string cps_;
};

}  // namespace dxaug
