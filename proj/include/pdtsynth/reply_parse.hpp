#pragma once

#include <algorithm>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pdtsynth/csv.hpp"
#include "pdtsynth/records.hpp"
#include "pdtsynth/text.hpp"
#include "pdtsynth/wordlist.hpp"

namespace pdt {

/// Fields recovered from a generation reply.
struct GenerationReply {
  std::string word;
  std::string review;
  std::optional<double> score;
  /// True when the `WORD: ... ||| REVIEW: ...` layout was found.
  bool structured = false;
};

namespace detail {

struct LabelHit {
  std::size_t label_pos;
  std::size_t value_pos;
  int kind;  // 0 score, 1 word, 2 review
};

inline bool is_word_char(char c) noexcept {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || static_cast<unsigned char>(c) >= 0x80;
}

// Labels count only at the start of the text, a line, or a `|||` segment,
// optionally preceded by spaces or markdown emphasis.
inline bool label_boundary(std::string_view s, std::size_t pos) noexcept {
  while (pos > 0 && (s[pos - 1] == ' ' || s[pos - 1] == '\t' || s[pos - 1] == '*')) --pos;
  return pos == 0 || s[pos - 1] == '\n' || s[pos - 1] == '|';
}

inline std::vector<LabelHit> find_labels(std::string_view s) {
  static constexpr std::string_view kLabels[] = {"SCORE", "WORD", "REVIEW"};
  std::vector<LabelHit> hits;
  for (int kind = 0; kind < 3; ++kind) {
    const auto label = kLabels[kind];
    for (std::size_t pos = text::ifind(s, label); pos != std::string_view::npos;
         pos = text::ifind(s, label, pos + 1)) {
      if (!label_boundary(s, pos)) continue;
      std::size_t after = pos + label.size();
      while (after < s.size() && s[after] == '*') ++after;
      if (after >= s.size() || s[after] != ':') continue;
      ++after;
      while (after < s.size() && s[after] == '*') ++after;
      hits.push_back({pos, after, kind});
    }
  }
  std::sort(hits.begin(), hits.end(), [](const LabelHit& a, const LabelHit& b) { return a.label_pos < b.label_pos; });
  return hits;
}

inline std::string_view clean_value(std::string_view v) {
  v = text::trim(v);
  while (v.size() >= 3 && v.substr(v.size() - 3) == "|||") v = text::trim(v.substr(0, v.size() - 3));
  while (!v.empty() && (v.back() == '|' || v.back() == '*')) v = text::trim(v.substr(0, v.size() - 1));
  while (!v.empty() && v.front() == '*') v = text::trim(v.substr(1));
  return v;
}

/// First decimal number in [0, 1] appearing in `s`.
inline std::optional<double> first_unit_number(std::string_view s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    const bool starts = std::isdigit(static_cast<unsigned char>(s[i])) ||
                        (s[i] == '.' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])));
    if (!starts) continue;
    if (i > 0 && (is_word_char(s[i - 1]) || s[i - 1] == '.')) continue;
    std::size_t j = i;
    while (j < s.size() && (std::isdigit(static_cast<unsigned char>(s[j])) || s[j] == '.')) ++j;
    auto tok = s.substr(i, j - i);
    while (!tok.empty() && tok.back() == '.') tok.remove_suffix(1);
    if (auto v = text::parse_double(tok); v && *v >= 0.0 && *v <= 1.0) return v;
    i = j;
  }
  return std::nullopt;
}

/// Earliest whole-word occurrence of any list member; longest wins at a tie.
inline std::optional<std::pair<std::size_t, const PdtWord*>> find_member(std::string_view s, const WordList& list) {
  std::optional<std::pair<std::size_t, const PdtWord*>> best;
  for (const auto& w : list.words()) {
    for (std::size_t pos = text::ifind(s, w.text); pos != std::string_view::npos; pos = text::ifind(s, w.text, pos + 1)) {
      const std::size_t end = pos + w.text.size();
      const bool left_ok = pos == 0 || !is_word_char(s[pos - 1]);
      const bool right_ok = end >= s.size() || !is_word_char(s[end]);
      if (!left_ok || !right_ok) continue;
      if (!best || pos < best->first || (pos == best->first && w.text.size() > best->second->text.size()))
        best = std::pair{pos, &w};
      break;
    }
  }
  return best;
}

inline std::vector<std::string_view> fallback_segments(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == '|' || s[i] == '\n') {
      auto seg = text::trim(s.substr(start, i - start));
      if (!seg.empty()) out.push_back(seg);
      start = i + 1;
    }
  }
  return out;
}

}  // namespace detail

/// Parses a generation reply. The labelled layout is preferred; otherwise the
/// first list member found is taken as the word and the longest remaining
/// segment as the review. Returns nullopt when no usable review (or, when
/// `want_score`, no score in [0, 1]) can be recovered.
inline std::optional<GenerationReply> parse_generation_reply(std::string_view reply, const WordList& list,
                                                             bool want_score) {
  GenerationReply out;
  const auto hits = detail::find_labels(reply);
  const bool has_review_label =
      std::any_of(hits.begin(), hits.end(), [](const detail::LabelHit& h) { return h.kind == 2; });

  if (has_review_label) {
    out.structured = true;
    bool score_label_seen = false;
    for (std::size_t i = 0; i < hits.size(); ++i) {
      const auto end = i + 1 < hits.size() ? hits[i + 1].label_pos : reply.size();
      const auto value = std::string(detail::clean_value(reply.substr(hits[i].value_pos, end - hits[i].value_pos)));
      switch (hits[i].kind) {
        case 0:
          score_label_seen = true;
          if (auto v = text::parse_double(text::strip_quotes(value)); v && *v >= 0.0 && *v <= 1.0) out.score = v;
          break;
        case 1: out.word = std::string(text::strip_quotes(value)); break;
        case 2: out.review = value; break;
        default: break;
      }
    }
    if (want_score && !out.score && !score_label_seen) out.score = detail::first_unit_number(reply);
  } else {
    const auto segments = detail::fallback_segments(reply);
    if (segments.empty()) return std::nullopt;
    std::size_t word_segment = segments.size();
    for (std::size_t i = 0; i < segments.size(); ++i) {
      if (auto c = list.validate_choice(segments[i]); c.valid) {
        out.word = c.canonical->text;
        word_segment = i;
        break;
      }
    }
    if (word_segment == segments.size()) {
      if (auto m = detail::find_member(reply, list)) {
        out.word = m->second->text;
      } else if (segments.size() >= 2) {
        out.word = std::string(text::strip_quotes(segments.front()));
        word_segment = 0;
      }
    }
    std::string_view longest;
    for (std::size_t i = 0; i < segments.size(); ++i)
      if (i != word_segment && segments[i].size() > longest.size()) longest = segments[i];
    out.review = std::string(longest);
    if (want_score) out.score = detail::first_unit_number(reply);
  }

  if (out.review.empty()) return std::nullopt;
  if (want_score && !out.score) return std::nullopt;
  return out;
}

/// Fields of a scoring reply. `base_score` is set only for Base+Adjust.
struct ScoringReply {
  std::string word;
  std::optional<double> base_score;
  double score = 0.0;
  Confidence confidence = Confidence::Low;
  std::string explanation;
};

/// Finds the first line that parses as the expected CSV schema, skipping
/// surrounding prose, code fences and header lines. Extra trailing columns
/// (an unquoted explanation with commas) are folded back into the explanation.
inline std::optional<ScoringReply> parse_scoring_reply(std::string_view reply, ScoringPrompt kind) {
  const std::size_t numeric_cols = kind == ScoringPrompt::Complete ? 1 : 2;
  const std::size_t expected = numeric_cols + 3;
  std::size_t line_start = 0;
  while (line_start < reply.size()) {
    std::size_t line_end = reply.find('\n', line_start);
    if (line_end == std::string_view::npos) line_end = reply.size();
    const auto line = text::trim(reply.substr(line_start, line_end - line_start));
    const std::size_t next = line_end + 1;
    if (line.empty() || line.substr(0, 3) == "```") {
      line_start = next;
      continue;
    }
    std::size_t pos = static_cast<std::size_t>(line.data() - reply.data());
    auto fields = csv::parse_record(reply, pos);
    if (!fields) {
      // Unbalanced quote: retry the bare line without multi-line quoting.
      std::size_t p2 = 0;
      std::string flat(line);
      for (auto& c : flat)
        if (c == '"') c = '\'';
      fields = csv::parse_record(flat, p2);
    }
    if (fields && fields->size() >= expected) {
      auto& f = *fields;
      ScoringReply out;
      out.word = std::string(text::strip_quotes(f[0]));
      std::vector<double> nums;
      for (std::size_t k = 1; k <= numeric_cols; ++k) {
        if (auto v = text::parse_double(text::strip_quotes(f[k]))) nums.push_back(*v);
      }
      const auto conf = parse_confidence(f[numeric_cols + 1]);
      if (nums.size() == numeric_cols && conf) {
        if (numeric_cols == 2) out.base_score = nums[0];
        out.score = nums.back();
        out.confidence = *conf;
        std::string expl = f[numeric_cols + 2];
        for (std::size_t k = expected; k < f.size(); ++k) expl += "," + f[k];
        out.explanation = std::string(text::trim(expl));
        return out;
      }
    }
    line_start = next;
  }
  return std::nullopt;
}

}  // namespace pdt
