#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pdtsynth/error.hpp"
#include "pdtsynth/text.hpp"
#include "pdtsynth/wordlist.hpp"

namespace pdt {

enum class MethodKind { WordReview, ReviewWord, SupplyWord };

constexpr std::string_view to_string(MethodKind m) noexcept {
  switch (m) {
    case MethodKind::WordReview: return "word-review";
    case MethodKind::ReviewWord: return "review-word";
    case MethodKind::SupplyWord: return "supply-word";
  }
  return "word-review";
}

constexpr std::string_view display_name(MethodKind m) noexcept {
  switch (m) {
    case MethodKind::WordReview: return "Word+Review";
    case MethodKind::ReviewWord: return "Review+Word";
    case MethodKind::SupplyWord: return "Supply-Word";
  }
  return "Word+Review";
}

/// Accepts "word-review", "Word+Review", "word_review", "wordreview", ...
inline std::optional<MethodKind> parse_method(std::string_view s) {
  std::string key;
  for (char c : text::trim(s))
    if (c != '-' && c != '+' && c != '_' && c != ' ') key += text::ascii_lower(c);
  if (key == "wordreview") return MethodKind::WordReview;
  if (key == "reviewword") return MethodKind::ReviewWord;
  if (key == "supplyword") return MethodKind::SupplyWord;
  return std::nullopt;
}

enum class Confidence { Low, Medium, High };

constexpr std::string_view to_string(Confidence c) noexcept {
  switch (c) {
    case Confidence::Low: return "low";
    case Confidence::Medium: return "medium";
    case Confidence::High: return "high";
  }
  return "low";
}

inline std::optional<Confidence> parse_confidence(std::string_view s) {
  s = text::strip_quotes(s);
  if (text::iequals(s, "low")) return Confidence::Low;
  if (text::iequals(s, "medium")) return Confidence::Medium;
  if (text::iequals(s, "high")) return Confidence::High;
  return std::nullopt;
}

enum class ScoringPrompt { Complete, BaseAdjust };

constexpr std::string_view to_string(ScoringPrompt p) noexcept {
  return p == ScoringPrompt::Complete ? "complete" : "base-adjust";
}

inline std::optional<ScoringPrompt> parse_scoring_prompt(std::string_view s) {
  std::string key;
  for (char c : text::trim(s))
    if (c != '-' && c != '+' && c != '_' && c != ' ') key += text::ascii_lower(c);
  if (key == "complete") return ScoringPrompt::Complete;
  if (key == "baseadjust") return ScoringPrompt::BaseAdjust;
  return std::nullopt;
}

/// Extra columns carried through from an input file, in file order.
using Annotations = std::vector<std::pair<std::string, std::string>>;

struct GenerationRecord {
  std::uint64_t id = 0;
  MethodKind method = MethodKind::WordReview;
  double target_score = 0.0;
  std::optional<std::vector<std::string>> offered_words;
  std::string word;
  bool word_valid = false;
  std::string review;
  std::optional<double> model_claimed_score;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  std::int64_t latency_ms = 0;
  int retries_used = 0;
  Annotations annotations;

  friend bool operator==(const GenerationRecord&, const GenerationRecord&) = default;
};

struct Scoring {
  double evaluated_score = 0.0;
  std::optional<double> base_score;
  std::optional<double> adjusted_score;
  Confidence confidence = Confidence::Low;
  std::string explanation;
  double abs_diff = 0.0;
  std::string scoring_model;
  ScoringPrompt scoring_prompt = ScoringPrompt::Complete;

  friend bool operator==(const Scoring&, const Scoring&) = default;
};

struct ScoredRecord {
  GenerationRecord gen;
  Scoring scoring;

  friend bool operator==(const ScoredRecord&, const ScoredRecord&) = default;
};

/// One dataset row as persisted: generation fields plus scoring when present.
struct DatasetRecord {
  GenerationRecord gen;
  std::optional<Scoring> scoring;

  DatasetRecord() = default;
  DatasetRecord(GenerationRecord g) : gen(std::move(g)) {}  // NOLINT(google-explicit-constructor)
  DatasetRecord(ScoredRecord s) : gen(std::move(s.gen)), scoring(std::move(s.scoring)) {}  // NOLINT

  friend bool operator==(const DatasetRecord&, const DatasetRecord&) = default;
};

using Dataset = std::vector<DatasetRecord>;

/// Checks the per-method invariants of a freshly generated record.
inline void check_invariants(const GenerationRecord& r) {
  const auto where = "record " + std::to_string(r.id) + ": ";
  if (!(r.target_score >= 0.0 && r.target_score <= 1.0))
    throw Error(ErrorCode::OutOfRange, where + "target_score outside [0, 1]");
  if (r.review.empty()) throw Error(ErrorCode::SchemaMismatch, where + "empty review");
  if (r.method == MethodKind::WordReview && (!r.offered_words || r.offered_words->size() != 10))
    throw Error(ErrorCode::SchemaMismatch, where + "Word+Review record needs exactly 10 offered words");
  if (r.method == MethodKind::SupplyWord &&
      (!r.model_claimed_score || *r.model_claimed_score != r.target_score))
    throw Error(ErrorCode::SchemaMismatch, where + "Supply-Word record needs model_claimed_score == target_score");
}

}  // namespace pdt
