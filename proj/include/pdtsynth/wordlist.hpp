#pragma once

#include <cstddef>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pdtsynth/builtin_data.hpp"
#include "pdtsynth/error.hpp"
#include "pdtsynth/rng.hpp"
#include "pdtsynth/text.hpp"

namespace pdt {

enum class Polarity { Positive, Negative, Neutral };

constexpr std::string_view to_string(Polarity p) noexcept {
  switch (p) {
    case Polarity::Positive: return "positive";
    case Polarity::Negative: return "negative";
    case Polarity::Neutral: return "neutral";
  }
  return "neutral";
}

inline std::optional<Polarity> parse_polarity(std::string_view s) {
  s = text::trim(s);
  if (text::iequals(s, "positive")) return Polarity::Positive;
  if (text::iequals(s, "negative")) return Polarity::Negative;
  if (text::iequals(s, "neutral")) return Polarity::Neutral;
  return std::nullopt;
}

struct PdtWord {
  std::string text;
  Polarity polarity = Polarity::Neutral;

  friend bool operator==(const PdtWord&, const PdtWord&) = default;
};

struct WordChoice {
  bool valid = false;
  std::optional<PdtWord> canonical;
};

struct PolarityCounts {
  std::size_t positive = 0;
  std::size_t negative = 0;
  std::size_t neutral = 0;
};

/// The reaction-card vocabulary. Immutable once constructed.
class WordList {
 public:
  static constexpr std::string_view kBuiltinSource = "builtin";

  /// Parses `word,polarity` lines; `#` lines and blank lines are skipped.
  static WordList parse(std::string_view content, std::string source) {
    WordList list;
    list.source_ = std::move(source);
    std::size_t line_no = 0;
    for (auto raw : text::split(content, '\n')) {
      ++line_no;
      auto line = text::trim(raw);
      if (line.empty() || line.front() == '#') continue;
      const auto comma = line.rfind(',');
      if (comma == std::string_view::npos)
        throw Error(ErrorCode::MalformedLine, list.source_ + ":" + std::to_string(line_no) + ": expected word,polarity");
      const auto word = text::trim(line.substr(0, comma));
      const auto polarity = parse_polarity(line.substr(comma + 1));
      if (word.empty() || !polarity)
        throw Error(ErrorCode::MalformedLine, list.source_ + ":" + std::to_string(line_no) + ": '" + std::string(line) + "'");
      const auto key = text::ascii_lower(word);
      if (list.index_.contains(key))
        throw Error(ErrorCode::DuplicateWord, list.source_ + ":" + std::to_string(line_no) + ": '" + std::string(word) + "'");
      list.index_.emplace(key, list.words_.size());
      list.words_.push_back(PdtWord{std::string(word), *polarity});
    }
    if (list.words_.empty()) throw Error(ErrorCode::EmptyList, list.source_ + ": no words");
    return list;
  }

  static WordList builtin() { return parse(builtin::kPdtWords, std::string(kBuiltinSource)); }

  /// "builtin" (or empty) selects the shipped list; anything else is a file path.
  static WordList load(const std::string& path_or_builtin) {
    if (path_or_builtin.empty() || path_or_builtin == kBuiltinSource) return builtin();
    std::ifstream in(path_or_builtin, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open word list '" + path_or_builtin + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path_or_builtin);
  }

  const std::vector<PdtWord>& words() const noexcept { return words_; }
  const std::string& source() const noexcept { return source_; }
  std::size_t size() const noexcept { return words_.size(); }
  const PdtWord& operator[](std::size_t i) const { return words_.at(i); }

  /// k distinct words drawn uniformly without replacement.
  std::vector<PdtWord> sample(std::size_t k, Rng& rng) const {
    if (k == 0) throw Error(ErrorCode::InvalidArgument, "sample size must be positive");
    if (k > words_.size())
      throw Error(ErrorCode::KTooLarge, "requested " + std::to_string(k) + " of " + std::to_string(words_.size()) + " words");
    std::vector<PdtWord> out;
    out.reserve(k);
    for (auto i : rng.sample_indices(words_.size(), k)) out.push_back(words_[i]);
    return out;
  }

  /// Membership after trimming whitespace and quote marks, case-insensitive.
  WordChoice validate_choice(std::string_view candidate) const {
    const auto key = text::ascii_lower(text::strip_quotes(candidate));
    if (auto it = index_.find(key); it != index_.end()) return {true, words_[it->second]};
    return {false, std::nullopt};
  }

  PolarityCounts polarity_counts() const noexcept {
    PolarityCounts c;
    for (const auto& w : words_) {
      switch (w.polarity) {
        case Polarity::Positive: ++c.positive; break;
        case Polarity::Negative: ++c.negative; break;
        case Polarity::Neutral: ++c.neutral; break;
      }
    }
    return c;
  }

 private:
  WordList() = default;

  std::vector<PdtWord> words_;
  std::unordered_map<std::string, std::size_t> index_;
  std::string source_;
};

}  // namespace pdt
