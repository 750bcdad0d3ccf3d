#pragma once

#include <array>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pdtsynth/builtin_data.hpp"
#include "pdtsynth/error.hpp"
#include "pdtsynth/text.hpp"

namespace pdt {

/// Universal part-of-speech tags.
enum class UposTag {
  ADJ, ADP, ADV, AUX, CCONJ, DET, INTJ, NOUN, NUM, PART, PRON, PROPN, PUNCT, SCONJ, SYM, VERB, X
};

inline constexpr std::array<std::string_view, 17> kUposNames = {
    "ADJ", "ADP", "ADV", "AUX", "CCONJ", "DET", "INTJ", "NOUN", "NUM",
    "PART", "PRON", "PROPN", "PUNCT", "SCONJ", "SYM", "VERB", "X"};

constexpr std::string_view to_string(UposTag t) noexcept { return kUposNames[static_cast<std::size_t>(t)]; }

inline std::optional<UposTag> parse_upos(std::string_view s) {
  for (std::size_t i = 0; i < kUposNames.size(); ++i)
    if (text::iequals(s, kUposNames[i])) return static_cast<UposTag>(i);
  return std::nullopt;
}

/// Maps a document's tokens to one coarse tag each.
class PosTagger {
 public:
  virtual ~PosTagger() = default;
  virtual std::vector<UposTag> tag(std::span<const std::string> tokens) const = 0;
};

/// Lexicon lookup, then suffix rules, then a few left-context repairs.
/// Unknown words default to NOUN.
class RuleTagger final : public PosTagger {
 public:
  static RuleTagger builtin() { return RuleTagger(builtin::kPosLexicon, "builtin"); }

  static RuleTagger from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open POS lexicon '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return RuleTagger(ss.str(), path);
  }

  /// Lexicon lines are `word TAG`; `#` lines are comments; first entry wins.
  RuleTagger(std::string_view lexicon, const std::string& source) {
    std::size_t line_no = 0;
    for (auto raw : text::split(lexicon, '\n')) {
      ++line_no;
      auto line = text::trim(raw);
      if (line.empty() || line.front() == '#') continue;
      const auto sp = line.find_first_of(" \t");
      const auto tag = sp == std::string_view::npos ? std::nullopt : parse_upos(text::trim(line.substr(sp + 1)));
      if (!tag) throw Error(ErrorCode::MalformedLine, source + ":" + std::to_string(line_no) + ": expected `word TAG`");
      lexicon_.try_emplace(text::ascii_lower(line.substr(0, sp)), *tag);
    }
  }

  std::vector<UposTag> tag(std::span<const std::string> tokens) const override {
    std::vector<UposTag> tags;
    tags.reserve(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      const auto& tok = tokens[i];
      bool from_lexicon = false;
      UposTag t = guess(tok, from_lexicon);
      if (!from_lexicon && i > 0) {
        const UposTag prev = tags.back();
        if (prev == UposTag::DET && t == UposTag::VERB) t = UposTag::ADJ;          // "the updated interface"
        else if (prev == UposTag::PART && tokens[i - 1] == "to") t = UposTag::VERB;  // "to navigate"
        else if (prev == UposTag::PRON && t == UposTag::NOUN && ends_with(tok, "s")) t = UposTag::VERB;
      }
      tags.push_back(t);
    }
    return tags;
  }

  std::size_t lexicon_size() const noexcept { return lexicon_.size(); }

 private:
  static bool ends_with(std::string_view s, std::string_view suffix) noexcept {
    return s.size() > suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
  }

  UposTag guess(const std::string& tok, bool& from_lexicon) const {
    if (auto it = lexicon_.find(tok); it != lexicon_.end()) {
      from_lexicon = true;
      return it->second;
    }
    if (tok.empty()) return UposTag::X;
    if (tok.find_first_not_of("0123456789.,'") == std::string::npos) return UposTag::NUM;
    if (const auto apos = tok.find('\''); apos != std::string::npos) {
      if (ends_with(tok, "n't")) return UposTag::AUX;
      if (auto it = lexicon_.find(tok.substr(0, apos)); it != lexicon_.end() && it->second == UposTag::PRON)
        return UposTag::PRON;
      return UposTag::NOUN;
    }
    static constexpr std::pair<std::string_view, UposTag> kSuffixes[] = {
        {"ly", UposTag::ADV},      {"ing", UposTag::VERB},  {"ed", UposTag::VERB},   {"ize", UposTag::VERB},
        {"ise", UposTag::VERB},    {"ify", UposTag::VERB},  {"ness", UposTag::NOUN}, {"ment", UposTag::NOUN},
        {"tion", UposTag::NOUN},   {"sion", UposTag::NOUN}, {"ity", UposTag::NOUN},  {"ance", UposTag::NOUN},
        {"ence", UposTag::NOUN},   {"ship", UposTag::NOUN}, {"ism", UposTag::NOUN},  {"ist", UposTag::NOUN},
        {"er", UposTag::NOUN},     {"ers", UposTag::NOUN},  {"or", UposTag::NOUN},   {"ous", UposTag::ADJ},
        {"ful", UposTag::ADJ},     {"less", UposTag::ADJ},  {"ive", UposTag::ADJ},   {"able", UposTag::ADJ},
        {"ible", UposTag::ADJ},    {"al", UposTag::ADJ},    {"ic", UposTag::ADJ},    {"ish", UposTag::ADJ},
        {"ary", UposTag::ADJ},     {"ant", UposTag::ADJ},   {"ent", UposTag::ADJ},   {"est", UposTag::ADJ},
    };
    const UposTag* best = nullptr;
    std::size_t best_len = 0;
    for (const auto& [suffix, t] : kSuffixes) {
      if (suffix.size() > best_len && tok.size() >= suffix.size() + 2 && ends_with(tok, suffix)) {
        best = &t;
        best_len = suffix.size();
      }
    }
    return best ? *best : UposTag::NOUN;
  }

  std::unordered_map<std::string, UposTag> lexicon_;
};

}  // namespace pdt
