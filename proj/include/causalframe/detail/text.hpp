#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace causalframe::detail {

inline char ascii_lower(char c) noexcept {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

inline std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = ascii_lower(c);
  return out;
}

inline bool is_ascii_space(char c) noexcept {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

inline std::string_view trim(std::string_view s) noexcept {
  while (!s.empty() && is_ascii_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_ascii_space(s.back())) s.remove_suffix(1);
  return s;
}

// Trims and collapses internal whitespace runs into single spaces.
inline std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char c : trim(s)) {
    if (is_ascii_space(c)) {
      pending_space = true;
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

// Byte offset of every code point in a UTF-8 string, plus a final entry equal
// to s.size(). Offsets used throughout the pipeline count code points, which
// is what tokenizer offset mappings report.
inline std::vector<std::size_t> codepoint_offsets(std::string_view s) {
  std::vector<std::size_t> offsets;
  offsets.reserve(s.size() + 1);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto byte = static_cast<unsigned char>(s[i]);
    if ((byte & 0xC0U) != 0x80U) offsets.push_back(i);
  }
  offsets.push_back(s.size());
  return offsets;
}

inline std::size_t codepoint_length(std::string_view s) {
  return codepoint_offsets(s).size() - 1;
}

namespace utf8 {

struct Decoded {
  std::uint32_t codepoint;
  std::size_t length;
};

// Lenient decoder: malformed sequences yield the lead byte as a code point.
inline Decoded decode(std::string_view s, std::size_t pos) noexcept {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  auto cont = [&](std::size_t k) -> int {
    if (pos + k >= s.size()) return -1;
    const auto b = static_cast<unsigned char>(s[pos + k]);
    return (b & 0xC0U) == 0x80U ? (b & 0x3FU) : -1;
  };
  if (b0 < 0x80U) return {b0, 1};
  if ((b0 & 0xE0U) == 0xC0U) {
    const int c1 = cont(1);
    if (c1 >= 0) return {((b0 & 0x1FU) << 6) | static_cast<std::uint32_t>(c1), 2};
  } else if ((b0 & 0xF0U) == 0xE0U) {
    const int c1 = cont(1), c2 = cont(2);
    if (c1 >= 0 && c2 >= 0)
      return {((b0 & 0x0FU) << 12) | (static_cast<std::uint32_t>(c1) << 6) |
                  static_cast<std::uint32_t>(c2),
              3};
  } else if ((b0 & 0xF8U) == 0xF0U) {
    const int c1 = cont(1), c2 = cont(2), c3 = cont(3);
    if (c1 >= 0 && c2 >= 0 && c3 >= 0)
      return {((b0 & 0x07U) << 18) | (static_cast<std::uint32_t>(c1) << 12) |
                  (static_cast<std::uint32_t>(c2) << 6) | static_cast<std::uint32_t>(c3),
              4};
  }
  return {b0, 1};
}

}  // namespace utf8

// Word characters are ASCII alphanumerics and non-ASCII code points outside
// the Latin-1 and General Punctuation separator ranges (so curly quotes and
// dashes split words the way their ASCII counterparts do).
inline bool is_word_codepoint(std::uint32_t cp) noexcept {
  if (cp < 0x80U) {
    return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
  }
  if (cp >= 0x80U && cp <= 0xBFU) return false;
  if (cp == 0xD7U || cp == 0xF7U) return false;
  if (cp >= 0x2000U && cp <= 0x206FU) return false;
  if (cp == 0x3000U || cp == 0xFEFFU) return false;
  return true;
}

// Lowercased word sequence of `s`; separators are dropped.
inline std::vector<std::string> split_words(std::string_view s) {
  std::vector<std::string> words;
  std::string current;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const auto d = utf8::decode(s, pos);
    if (is_word_codepoint(d.codepoint)) {
      for (std::size_t k = 0; k < d.length; ++k) current.push_back(ascii_lower(s[pos + k]));
    } else if (!current.empty()) {
      words.push_back(std::move(current));
      current.clear();
    }
    pos += d.length;
  }
  if (!current.empty()) words.push_back(std::move(current));
  return words;
}

inline bool has_ascii_upper(std::string_view s) noexcept {
  for (char c : s)
    if (c >= 'A' && c <= 'Z') return true;
  return false;
}

inline std::vector<std::string> split_on(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t begin = 0;
  while (true) {
    const auto end = s.find(sep, begin);
    parts.emplace_back(trim(s.substr(begin, end == std::string_view::npos ? s.npos : end - begin)));
    if (end == std::string_view::npos) break;
    begin = end + 1;
  }
  return parts;
}

}  // namespace causalframe::detail
