#include "deqe/corpus.hpp"

#include <array>

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf16.h>
#include <unicode/utf8.h>

#include <stdexcept>

namespace deqe {

namespace {

bool is_ascii(std::string_view text) {
  for (unsigned char c : text) {
    if (c >= 0x80) return false;
  }
  return true;
}

// ASCII slice of the Unicode White_Space and P* properties, so both paths
// classify identically.
struct AsciiClasses {
  std::array<bool, 128> space{};
  std::array<bool, 128> punct{};
  AsciiClasses() {
    for (UChar32 c = 0; c < 128; ++c) {
      space[c] = u_isUWhiteSpace(c);
      punct[c] = u_ispunct(c);
    }
  }
};

const AsciiClasses& ascii_classes() {
  static const AsciiClasses classes;
  return classes;
}

TokenizedSegment tokenize_ascii(std::string_view text, const TokenizerConfig& config) {
  const auto& classes = ascii_classes();
  TokenizedSegment out;
  std::string current;
  for (unsigned char c : text) {
    if (classes.space[c]) {
      if (!current.empty()) out.tokens.push_back(std::move(current));
      current.clear();
      continue;
    }
    if (config.strip_punct && classes.punct[c]) continue;
    if (config.lowercase && c >= 'A' && c <= 'Z') c = static_cast<unsigned char>(c - 'A' + 'a');
    current.push_back(static_cast<char>(c));
  }
  if (!current.empty()) out.tokens.push_back(std::move(current));
  return out;
}

void append_utf8(std::string& out, UChar32 c) {
  std::array<uint8_t, U8_MAX_LENGTH> buf{};
  int32_t len = 0;
  U8_APPEND_UNSAFE(buf.data(), len, c);
  out.append(reinterpret_cast<const char*>(buf.data()), static_cast<std::size_t>(len));
}

const icu::Normalizer2& nfc() {
  static const icu::Normalizer2* instance = [] {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* n = icu::Normalizer2::getNFCInstance(status);
    if (U_FAILURE(status)) throw std::runtime_error("ICU NFC normalizer unavailable");
    return n;
  }();
  return *instance;
}

TokenizedSegment tokenize_unicode(std::string_view text, const TokenizerConfig& config) {
  UErrorCode status = U_ZERO_ERROR;
  const auto& normalizer = nfc();
  icu::UnicodeString normalized = normalizer.normalize(
      icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<int32_t>(text.size()))),
      status);
  if (config.lowercase) {
    normalized.foldCase(U_FOLD_CASE_DEFAULT);
    normalized = normalizer.normalize(normalized, status);
  }
  if (U_FAILURE(status)) throw std::runtime_error("ICU normalization failed");

  TokenizedSegment out;
  std::string current;
  const char16_t* buf = normalized.getBuffer();
  const int32_t len = normalized.length();
  for (int32_t i = 0; i < len;) {
    UChar32 c = 0;
    U16_NEXT(buf, i, len, c);
    if (u_isUWhiteSpace(c)) {
      if (!current.empty()) out.tokens.push_back(std::move(current));
      current.clear();
      continue;
    }
    if (config.strip_punct && u_ispunct(c)) continue;
    append_utf8(current, c);
  }
  if (!current.empty()) out.tokens.push_back(std::move(current));
  return out;
}

}  // namespace

TokenizedSegment tokenize(std::string_view text, const TokenizerConfig& config) {
  if (is_ascii(text)) return tokenize_ascii(text, config);
  return tokenize_unicode(text, config);
}

bool is_valid_utf8(std::string_view text) {
  const auto* s = reinterpret_cast<const uint8_t*>(text.data());
  const auto len = static_cast<int32_t>(text.size());
  for (int32_t i = 0; i < len;) {
    if (s[i] < 0x80) {
      ++i;
      continue;
    }
    UChar32 c = 0;
    U8_NEXT(s, i, len, c);
    if (c < 0) return false;
  }
  return true;
}

}  // namespace deqe
