#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "pdtsynth/records.hpp"
#include "pdtsynth/text.hpp"
#include "pdtsynth/wordlist.hpp"

namespace pdt::prompts {

inline constexpr std::string_view kVersion = "pdt-prompts/1";

// Generation instructions. These are sent verbatim; the output-format suffix
// is appended separately so both are recorded in the run manifest.

inline std::string word_review(std::string_view product, std::string_view word_list) {
  std::string s = "For a hypothetical ";
  s += product;
  s += ", you will produce hypothetical survey data that will be comprised of the respondent picking a word "
       "from the following comma separated list that describes their experience with the product, and then "
       "providing an explanation for the word choice. I will give you a sentiment score between 0.0-1.0 and "
       "for that sentiment number, you will select a word and produce a human like comment. Words: ";
  s += word_list;
  return s;
}

inline std::string review_word(std::string_view product, std::string_view word_list) {
  std::string s =
      "I will give you a sentiment score between 0.0-1.0. For that sentiment number, you will produce a "
      "hypothetical product review for a hypothetical ";
  s += product;
  s += " that matches the sentiment, and then pick a word from the following comma separated list that best "
       "matches the meaning of the review. Words: ";
  s += word_list;
  return s;
}

inline std::string supply_word(std::string_view product, std::string_view word) {
  std::string s = "A hypothetical ";
  s += product;
  s += " has been described as: ";
  s += word;
  s += ". Provide a sentiment score for the word between 0.00-1.00 (two decimal places) based on your implicit "
       "understanding of sentiment. For the sentiment score, produce a hypothetical product review that captures "
       "that sentiment and is appropriate for the chosen word. The review doesn't necessarily need to include the "
       "chosen word and should capture the complex nuance of sentiment produced by a human.";
  return s;
}

inline constexpr std::string_view kWordReviewFormat = "Respond on one line as: WORD: <word> ||| REVIEW: <review>";
inline constexpr std::string_view kSupplyWordFormat =
    "Respond on one line as: SCORE: <0.00-1.00> ||| WORD: <word> ||| REVIEW: <review>";

inline std::string_view format_suffix(MethodKind m) noexcept {
  return m == MethodKind::SupplyWord ? kSupplyWordFormat : kWordReviewFormat;
}

inline std::string with_format(std::string instruction, MethodKind m) {
  instruction += "\n\n";
  instruction += format_suffix(m);
  return instruction;
}

inline std::string join_words(const std::vector<PdtWord>& words) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out += ", ";
    out += words[i].text;
  }
  return out;
}

/// User message carrying the target score for Word+Review and Review+Word.
inline std::string target_message(double target) { return "Sentiment score: " + text::format_fixed(target, 2); }

/// Placeholder templates recorded in manifests.
inline std::string template_for(MethodKind m) {
  switch (m) {
    case MethodKind::WordReview: return word_review("{product}", "{words}");
    case MethodKind::ReviewWord: return review_word("{product}", "{words}");
    case MethodKind::SupplyWord: return supply_word("{product}", "{word}");
  }
  return {};
}

inline std::string user_template_for(MethodKind m) {
  return m == MethodKind::SupplyWord ? "{word}" : "Sentiment score: {score}";
}

// Scoring instructions.

inline constexpr std::string_view kBaseAdjust =
    "I will give a line containing a word choice followed by an explanation for the choice. For this line, "
    "provide a sentiment analysis score for each word between 0.00-1.00 (to two decimal places) where is 0.00 is "
    "a completely negative sentiment and 1.00 is a completely positive sentiment, and then an adjusted score for "
    "the word based on the explanation. Include your confidence in the accuracy of that score (low, medium, high). "
    "Additionally, provide a carefully crafted contextual explanation for the sentiment score that is related to "
    "the meaning of the text. Please provide your response in a text-based csv format on one line, with columns "
    "for the word, original score, adjusted score, confidence, and explanation. Please do not provide any other "
    "response aside from the csv formatted data.";

inline constexpr std::string_view kComplete =
    "I will give a word describing a user's experience with a product followed by a full review. Based on your "
    "implicit understanding of sentiment, provide a sentiment score for the word and review between 0.00-1.00 "
    "inclusive (to two decimal places) where is 0.00 is a completely negative sentiment and 1.00 is a completely "
    "positive sentiment. Include your confidence in the accuracy of that score (low, medium, high). Additionally, "
    "provide a carefully crafted contextual explanation for the sentiment score that is related to the meaning of "
    "the text. Please provide your response in a text-based csv format on one line, with columns for the word, "
    "sentiment score, confidence, and explanation. Please do not provide any other response aside from the csv "
    "formatted data.";

inline std::string_view scoring_instruction(ScoringPrompt p) noexcept {
  return p == ScoringPrompt::Complete ? kComplete : kBaseAdjust;
}

/// Word and review as the scoring user message. Base+Adjust expects a single line.
inline std::string scoring_message(ScoringPrompt p, std::string_view word, std::string_view review) {
  if (p == ScoringPrompt::Complete) {
    std::string s = "Word: ";
    s += word;
    s += "\nReview: ";
    s += review;
    return s;
  }
  std::string line(word);
  line += ": ";
  for (char c : review) line += (c == '\n' || c == '\r') ? ' ' : c;
  return line;
}

}  // namespace pdt::prompts
