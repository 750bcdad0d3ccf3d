#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace pdt {

// Word tokenizer following the main Unicode word-boundary rules: letters and
// digits form words; apostrophes, full stops and colons join letters on both
// sides ("don't", "e.g"); full stops, commas and apostrophes join digits
// ("1,000", "3.5"). Everything else (punctuation, symbols, emoji, spaces)
// separates words and is dropped. Output is lowercased for ASCII, Latin-1,
// Latin Extended-A, Greek and Cyrillic; typographic apostrophes become '.

namespace detail::utf8 {

struct Decoded {
  char32_t cp;
  std::size_t len;
};

inline Decoded decode(std::string_view s, std::size_t i) noexcept {
  const auto b0 = static_cast<unsigned char>(s[i]);
  auto cont = [&](std::size_t k) -> int {
    if (i + k >= s.size()) return -1;
    const auto b = static_cast<unsigned char>(s[i + k]);
    return (b & 0xC0) == 0x80 ? (b & 0x3F) : -1;
  };
  if (b0 < 0x80) return {b0, 1};
  if ((b0 & 0xE0) == 0xC0) {
    const int c1 = cont(1);
    if (c1 >= 0) return {static_cast<char32_t>(((b0 & 0x1F) << 6) | c1), 2};
  } else if ((b0 & 0xF0) == 0xE0) {
    const int c1 = cont(1), c2 = cont(2);
    if (c1 >= 0 && c2 >= 0) return {static_cast<char32_t>(((b0 & 0x0F) << 12) | (c1 << 6) | c2), 3};
  } else if ((b0 & 0xF8) == 0xF0) {
    const int c1 = cont(1), c2 = cont(2), c3 = cont(3);
    if (c1 >= 0 && c2 >= 0 && c3 >= 0)
      return {static_cast<char32_t>(((b0 & 0x07) << 18) | (c1 << 12) | (c2 << 6) | c3), 4};
  }
  return {0xFFFD, 1};
}

inline void encode(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

}  // namespace detail::utf8

namespace detail {

enum class CharClass { Letter, Digit, Apostrophe, MidLetter, MidNumLet, MidNum, Other };

inline CharClass classify(char32_t cp) noexcept {
  if (cp < 0x80) {
    if ((cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z')) return CharClass::Letter;
    if (cp >= '0' && cp <= '9') return CharClass::Digit;
    if (cp == '\'') return CharClass::Apostrophe;
    if (cp == '.') return CharClass::MidNumLet;
    if (cp == ':') return CharClass::MidLetter;
    if (cp == ',' || cp == ';') return CharClass::MidNum;
    return CharClass::Other;
  }
  if (cp == 0x2019 || cp == 0x2018) return CharClass::Apostrophe;
  if (cp == 0x00B7) return CharClass::MidLetter;
  if (cp == 0x00AA || cp == 0x00B5 || cp == 0x00BA) return CharClass::Letter;
  if (cp < 0x00C0 || cp == 0x00D7 || cp == 0x00F7) return CharClass::Other;
  if (cp >= 0x0660 && cp <= 0x0669) return CharClass::Digit;
  if ((cp >= 0x2000 && cp <= 0x2BFF) || (cp >= 0x3000 && cp <= 0x303F) || (cp >= 0xFE30 && cp <= 0xFE6F) ||
      (cp >= 0xFF00 && cp <= 0xFF0F) || (cp >= 0xFF1A && cp <= 0xFF20) || (cp >= 0x1F000 && cp <= 0x1FAFF) ||
      (cp >= 0xD800 && cp <= 0xDFFF) || cp == 0xFFFD || (cp >= 0xFE00 && cp <= 0xFE0F))
    return CharClass::Other;
  return CharClass::Letter;
}

inline char32_t to_lower(char32_t cp) noexcept {
  if (cp >= 'A' && cp <= 'Z') return cp + 32;
  if (cp < 0xC0) return cp;
  if ((cp >= 0xC0 && cp <= 0xDE) && cp != 0xD7) return cp + 32;
  if (cp >= 0x100 && cp <= 0x137) return cp | 1;
  if (cp >= 0x139 && cp <= 0x148) return (cp & 1) ? cp + 1 : cp;
  if (cp >= 0x14A && cp <= 0x177) return cp | 1;
  if (cp == 0x178) return 0xFF;
  if (cp == 0x179 || cp == 0x17B || cp == 0x17D) return cp + 1;
  if (cp >= 0x391 && cp <= 0x3AB && cp != 0x3A2) return cp + 32;
  if (cp >= 0x410 && cp <= 0x42F) return cp + 32;
  if (cp >= 0x400 && cp <= 0x40F) return cp + 80;
  return cp;
}

}  // namespace detail

/// Lowercased word tokens of `s`.
inline std::vector<std::string> tokenize(std::string_view s) {
  using detail::CharClass;
  struct Unit {
    char32_t cp;
    CharClass cls;
  };
  std::vector<Unit> units;
  units.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    const auto d = detail::utf8::decode(s, i);
    units.push_back({d.cp, detail::classify(d.cp)});
    i += d.len;
  }

  std::vector<std::string> tokens;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) tokens.push_back(std::move(cur));
    cur.clear();
  };
  for (std::size_t i = 0; i < units.size(); ++i) {
    const auto cls = units[i].cls;
    if (cls == CharClass::Letter || cls == CharClass::Digit) {
      detail::utf8::encode(detail::to_lower(units[i].cp), cur);
      continue;
    }
    if (cls != CharClass::Other && !cur.empty() && i + 1 < units.size()) {
      const auto prev = units[i - 1].cls;
      const auto next = units[i + 1].cls;
      const bool letters = prev == CharClass::Letter && next == CharClass::Letter &&
                           (cls == CharClass::Apostrophe || cls == CharClass::MidLetter || cls == CharClass::MidNumLet);
      const bool digits = prev == CharClass::Digit && next == CharClass::Digit &&
                          (cls == CharClass::Apostrophe || cls == CharClass::MidNum || cls == CharClass::MidNumLet);
      if (letters || digits) {
        if (cls == CharClass::Apostrophe)
          cur += '\'';
        else
          detail::utf8::encode(units[i].cp, cur);
        continue;
      }
    }
    flush();
  }
  flush();
  return tokens;
}

/// Documents as integer token ids over a shared vocabulary.
struct TokenizedCorpus {
  std::vector<std::vector<std::uint32_t>> docs;
  std::vector<std::string> vocab;

  std::size_t token_count() const noexcept {
    std::size_t n = 0;
    for (const auto& d : docs) n += d.size();
    return n;
  }
};

template <class Range>
TokenizedCorpus tokenize_corpus(const Range& documents) {
  TokenizedCorpus out;
  std::unordered_map<std::string, std::uint32_t> ids;
  for (const auto& doc : documents) {
    auto& ids_out = out.docs.emplace_back();
    for (auto& tok : tokenize(doc)) {
      auto [it, inserted] = ids.try_emplace(tok, static_cast<std::uint32_t>(out.vocab.size()));
      if (inserted) out.vocab.push_back(std::move(tok));
      ids_out.push_back(it->second);
    }
  }
  return out;
}

}  // namespace pdt
