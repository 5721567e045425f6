#include "dxaug/text.hpp"

#include <stdexcept>

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/ustring.h>
#include <unicode/utf8.h>

namespace dxaug {

namespace {

icu::UnicodeString decode_strict(std::string_view utf8) {
  // u_strFromUTF8 reports U_INVALID_CHAR_FOUND on ill-formed input instead
  // of silently substituting U+FFFD.
  UErrorCode status = U_ZERO_ERROR;
  int32_t needed = 0;
  u_strFromUTF8(nullptr, 0, &needed, utf8.data(),
                static_cast<int32_t>(utf8.size()), &status);
  if (status != U_BUFFER_OVERFLOW_ERROR && U_FAILURE(status)) {
    throw std::invalid_argument("ill-formed UTF-8");
  }
  icu::UnicodeString out;
  status = U_ZERO_ERROR;
  UChar* buf = out.getBuffer(needed + 1);
  u_strFromUTF8(buf, needed + 1, nullptr, utf8.data(),
                static_cast<int32_t>(utf8.size()), &status);
  out.releaseBuffer(needed);
  if (U_FAILURE(status)) throw std::invalid_argument("ill-formed UTF-8");
  return out;
}

std::u32string to_u32(const icu::UnicodeString& s) {
  std::u32string out;
  out.reserve(static_cast<std::size_t>(s.length()));
  for (int32_t i = 0; i < s.length();) {
    UChar32 c = s.char32At(i);
    out.push_back(static_cast<char32_t>(c));
    i += U16_LENGTH(c);
  }
  return out;
}

}  // namespace

std::u32string utf8_to_u32(std::string_view utf8) {
  return to_u32(decode_strict(utf8));
}

std::string u32_to_utf8(std::u32string_view cps) {
  std::string out;
  out.reserve(cps.size() * 3);
  for (char32_t c : cps) {
    char buf[4];
    int32_t len = 0;
    UBool err = false;
    U8_APPEND(reinterpret_cast<uint8_t*>(buf), len, 4, static_cast<UChar32>(c),
              err);
    if (err) throw std::invalid_argument("invalid code point");
    out.append(buf, static_cast<std::size_t>(len));
  }
  return out;
}

std::string normalize_text(std::string_view utf8) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfkc = icu::Normalizer2::getNFKCInstance(status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU NFKC unavailable");
  icu::UnicodeString normalized = nfkc->normalize(decode_strict(utf8), status);
  if (U_FAILURE(status)) throw std::runtime_error("NFKC normalization failed");

  std::u32string cps = to_u32(normalized);
  std::size_t begin = 0;
  std::size_t end = cps.size();
  while (begin < end && u_isUWhiteSpace(static_cast<UChar32>(cps[begin]))) {
    ++begin;
  }
  while (end > begin && u_isUWhiteSpace(static_cast<UChar32>(cps[end - 1]))) {
    --end;
  }
  return u32_to_utf8(std::u32string_view(cps).substr(begin, end - begin));
}

std::vector<std::string> split(std::string_view s, std::string_view sep) {
  std::vector<std::string> out;
  if (sep.empty()) {
    out.emplace_back(s);
    return out;
  }
  std::size_t pos = 0;
  while (true) {
    std::size_t next = s.find(sep, pos);
    if (next == std::string_view::npos) {
      out.emplace_back(s.substr(pos));
      return out;
    }
    out.emplace_back(s.substr(pos, next - pos));
    pos = next + sep.size();
  }
}

TermText::TermText(std::string_view utf8)
    : raw_(normalize_text(utf8)), cps_(utf8_to_u32(raw_)) {
  if (cps_.empty()) throw std::invalid_argument("empty term");
}

std::string TermText::substr(std::size_t start, std::size_t end) const {
  if (start > end || end > cps_.size()) {
    throw std::out_of_range("code-point range out of bounds");
  }
  return u32_to_utf8(std::u32string_view(cps_).substr(start, end - start));
}

}  // namespace dxaug
