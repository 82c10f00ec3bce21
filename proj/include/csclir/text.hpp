#pragma once

// UTF-8 word tokenizer and case folding.
//
// The tokenizer is lossless: the surfaces of the returned tokens, concatenated
// in order, reproduce the input byte for byte. Three kinds of token exist:
// words (maximal runs of non-space, non-punctuation code points), single
// punctuation code points, and whitespace runs.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace csclir {

enum class TokenKind : std::uint8_t { kWord, kPunct, kSpace };

struct Token {
  std::string_view surface;  // view into the tokenized text
  TokenKind kind = TokenKind::kWord;
  std::size_t begin = 0;  // byte offset into the source text
  std::size_t end = 0;

  bool is_word() const noexcept { return kind == TokenKind::kWord; }
};

namespace utf8 {

struct Decoded {
  char32_t cp;
  std::size_t len;
};

// Decodes one code point. Invalid or truncated sequences decode as a single
// byte (U+FFFD stand-in keeps the byte inside words).
inline Decoded decode(std::string_view s, std::size_t i) noexcept {
  const auto b0 = static_cast<unsigned char>(s[i]);
  auto cont = [&](std::size_t k) {
    return i + k < s.size() && (static_cast<unsigned char>(s[i + k]) & 0xC0) == 0x80;
  };
  auto bits = [&](std::size_t k) { return static_cast<char32_t>(s[i + k] & 0x3F); };
  if (b0 < 0x80) return {b0, 1};
  if ((b0 & 0xE0) == 0xC0 && cont(1)) {
    return {static_cast<char32_t>((b0 & 0x1F) << 6) | bits(1), 2};
  }
  if ((b0 & 0xF0) == 0xE0 && cont(1) && cont(2)) {
    return {static_cast<char32_t>((b0 & 0x0F) << 12) | (bits(1) << 6) | bits(2), 3};
  }
  if ((b0 & 0xF8) == 0xF0 && cont(1) && cont(2) && cont(3)) {
    return {static_cast<char32_t>((b0 & 0x07) << 18) | (bits(1) << 12) | (bits(2) << 6) | bits(3),
            4};
  }
  return {0xFFFD, 1};
}

inline void append(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

}  // namespace utf8

inline constexpr bool is_space(char32_t c) noexcept {
  return (c >= 0x09 && c <= 0x0D) || c == 0x20 || c == 0x85 || c == 0xA0 || c == 0x1680 ||
         (c >= 0x2000 && c <= 0x200A) || c == 0x2028 || c == 0x2029 || c == 0x202F ||
         c == 0x205F || c == 0x3000;
}

inline constexpr bool is_punct(char32_t c) noexcept {
  if (c < 0x80) {
    return (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) || (c >= 0x5B && c <= 0x60) ||
           (c >= 0x7B && c <= 0x7E);
  }
  switch (c) {
    case 0xA1: case 0xA7: case 0xAB: case 0xB6: case 0xB7: case 0xBB: case 0xBF:
    case 0x37E: case 0x387:                            // Greek question mark, ano teleia
    case 0x55A: case 0x55B: case 0x55C: case 0x55D: case 0x55E: case 0x55F: case 0x589:
    case 0x60C: case 0x61B: case 0x61F: case 0x6D4:    // Arabic comma, semicolon, ...
    case 0x964: case 0x965:                            // Devanagari danda
      return true;
    default:
      break;
  }
  return (c >= 0x66A && c <= 0x66D) || (c >= 0x2010 && c <= 0x2027) ||
         (c >= 0x2030 && c <= 0x205E) || (c >= 0x3001 && c <= 0x3003) ||
         (c >= 0x3008 && c <= 0x3011) || (c >= 0x3014 && c <= 0x301F) ||
         (c >= 0xFF01 && c <= 0xFF0F) || (c >= 0xFF1A && c <= 0xFF20) ||
         (c >= 0xFF3B && c <= 0xFF40) || (c >= 0xFF5B && c <= 0xFF65);
}

// Simple one-to-one lowercase mapping for the cased scripts the toolkit meets
// in practice. No multi-character folds (ß stays ß).
inline constexpr char32_t fold_char(char32_t c) noexcept {
  if (c >= U'A' && c <= U'Z') return c + 32;
  if (c < 0xC0) return c;
  if (c <= 0xDE) return c == 0xD7 ? c : c + 32;
  if (c < 0x100) return c;
  if (c <= 0x17F) {
    if (c == 0x130) return U'i';
    if (c == 0x178) return 0xFF;
    if ((c <= 0x12F) || (c >= 0x132 && c <= 0x137) || (c >= 0x14A && c <= 0x177)) {
      return (c % 2 == 0) ? c + 1 : c;
    }
    if ((c >= 0x139 && c <= 0x148) || (c >= 0x179 && c <= 0x17E)) {
      return (c % 2 == 1) ? c + 1 : c;
    }
    return c;
  }
  if (c >= 0x391 && c <= 0x3A9 && c != 0x3A2) return c + 32;
  if (c == 0x386) return 0x3AC;
  if (c >= 0x388 && c <= 0x38A) return c + 37;
  if (c == 0x38C) return 0x3CC;
  if (c == 0x38E || c == 0x38F) return c + 63;
  if (c >= 0x400 && c <= 0x40F) return c + 80;
  if (c >= 0x410 && c <= 0x42F) return c + 32;
  if ((c >= 0x460 && c <= 0x481) || (c >= 0x48A && c <= 0x4BF) || (c >= 0x4D0 && c <= 0x4FF)) {
    return (c % 2 == 0) ? c + 1 : c;
  }
  if (c >= 0x531 && c <= 0x556) return c + 48;
  if ((c >= 0x1E00 && c <= 0x1E95) || (c >= 0x1EA0 && c <= 0x1EFF)) {
    return (c % 2 == 0) ? c + 1 : c;
  }
  if (c >= 0xFF21 && c <= 0xFF3A) return c + 32;
  return c;
}

inline std::string fold_case(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    auto [cp, len] = utf8::decode(s, i);
    const char32_t folded = fold_char(cp);
    if (folded == cp) {
      out.append(s.substr(i, len));
    } else {
      utf8::append(out, folded);
    }
    i += len;
  }
  return out;
}

// The returned tokens view into `text`; the caller keeps it alive.
inline std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    const std::size_t start = i;
    auto [cp, len] = utf8::decode(text, i);
    TokenKind kind;
    if (is_space(cp)) {
      kind = TokenKind::kSpace;
      i += len;
      while (i < text.size()) {
        auto next = utf8::decode(text, i);
        if (!is_space(next.cp)) break;
        i += next.len;
      }
    } else if (is_punct(cp)) {
      kind = TokenKind::kPunct;
      i += len;
    } else {
      kind = TokenKind::kWord;
      i += len;
      while (i < text.size()) {
        auto next = utf8::decode(text, i);
        if (is_space(next.cp) || is_punct(next.cp)) break;
        i += next.len;
      }
    }
    tokens.push_back(Token{text.substr(start, i - start), kind, start, i});
  }
  return tokens;
}

// Case-folded word tokens only.
inline std::vector<std::string> folded_words(std::string_view text) {
  std::vector<std::string> words;
  for (const Token& t : tokenize(text)) {
    if (t.is_word()) words.push_back(fold_case(t.surface));
  }
  return words;
}

inline std::size_t count_words(std::string_view text) {
  std::size_t n = 0;
  for (const Token& t : tokenize(text)) n += t.is_word() ? 1 : 0;
  return n;
}

// Splits on a single delimiter character, keeping empty fields.
inline std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

// Splits on runs of ASCII spaces and tabs, dropping empty fields.
inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

// Strips one trailing '\r' so CRLF files read like LF files.
inline std::string_view chomp(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

}  // namespace csclir
