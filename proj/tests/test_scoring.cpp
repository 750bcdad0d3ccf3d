#include <gtest/gtest.h>

#include <cmath>

#include "pdtsynth/reply_parse.hpp"
#include "pdtsynth/scoring.hpp"
#include "pdtsynth/scripted_provider.hpp"

using namespace pdt;

namespace {

ScriptLine reply(std::string text) {
  ScriptLine l;
  l.text = std::move(text);
  l.prompt_tokens = 200;
  l.completion_tokens = 30;
  return l;
}

GenerationRecord record(std::string word, std::string review, double target, std::uint64_t id = 1) {
  GenerationRecord r;
  r.id = id;
  r.method = MethodKind::ReviewWord;
  r.word = std::move(word);
  r.word_valid = true;
  r.review = std::move(review);
  r.target_score = target;
  return r;
}

ScoredRecord base_adjust(std::uint64_t id, double base, double adjusted) {
  ScoredRecord s;
  s.gen = record("Fun", "r", 0.5, id);
  s.scoring.scoring_prompt = ScoringPrompt::BaseAdjust;
  s.scoring.base_score = base;
  s.scoring.adjusted_score = adjusted;
  s.scoring.evaluated_score = adjusted;
  return s;
}

}  // namespace

TEST(ScoringPrompts, MessagesPerPrompt) {
  EXPECT_EQ(prompts::scoring_message(ScoringPrompt::Complete, "Fun", "Great."), "Word: Fun\nReview: Great.");
  EXPECT_EQ(prompts::scoring_message(ScoringPrompt::BaseAdjust, "Fun", "Great.\nReally."), "Fun: Great. Really.");
  EXPECT_NE(prompts::scoring_instruction(ScoringPrompt::Complete).find("sentiment score"), std::string_view::npos);
  EXPECT_NE(prompts::scoring_instruction(ScoringPrompt::BaseAdjust).find("adjusted score"), std::string_view::npos);
}

TEST(ScoreComplete, MixedReviewScoredHigh) {
  ScriptedProvider p({reply("Flexible,0.85,high,\"Adapts well, though setup was slow.\"")});
  const auto s = score_complete(record("Flexible", "It bends to my needs but took a while to configure.", 0.60), p);
  EXPECT_DOUBLE_EQ(s.scoring.evaluated_score, 0.85);
  EXPECT_DOUBLE_EQ(s.scoring.abs_diff, std::fabs(0.60 - 0.85));
  EXPECT_EQ(s.scoring.confidence, Confidence::High);
  EXPECT_EQ(s.scoring.explanation, "Adapts well, though setup was slow.");
  EXPECT_EQ(s.scoring.scoring_prompt, ScoringPrompt::Complete);
  const auto sent = p.requests();
  EXPECT_EQ(sent[0].temperature, 0.0);
  EXPECT_EQ(sent[0].user_prompt, "Word: Flexible\nReview: It bends to my needs but took a while to configure.");
}

TEST(ScoreComplete, ExactMatchHasZeroDiff) {
  ScriptedProvider p({reply("Fun,0.70,medium,Enjoyable")});
  EXPECT_EQ(score_complete(record("Fun", "Nice.", 0.70), p).scoring.abs_diff, 0.0);
}

TEST(ScoreComplete, OutOfRangeIsClampedAndNoted) {
  ScriptedProvider p({reply("Fun,1.37,high,Very positive"), reply("Fun,-0.2,low,Odd")});
  const auto hi = score_complete(record("Fun", "Nice.", 0.9), p);
  EXPECT_EQ(hi.scoring.evaluated_score, 1.0);
  EXPECT_NE(hi.scoring.explanation.find("clamped from 1.37"), std::string::npos);
  const auto lo = score_complete(record("Fun", "Nice.", 0.9), p);
  EXPECT_EQ(lo.scoring.evaluated_score, 0.0);
}

TEST(ScoreComplete, ProseAndFencesAreSkipped) {
  ScriptedProvider p({reply("Here you go:\n```csv\nword,score,confidence,explanation\nDated,0.25,medium,Looks old\n```")});
  const auto s = score_complete(record("Dated", "Old.", 0.2), p);
  EXPECT_DOUBLE_EQ(s.scoring.evaluated_score, 0.25);
  EXPECT_EQ(s.scoring.explanation, "Looks old");
}

TEST(ScoreComplete, UnquotedCommasFoldIntoExplanation) {
  const auto r = parse_scoring_reply("Fun,0.8,high,Bright, lively, and quick", ScoringPrompt::Complete);
  ASSERT_TRUE(r);
  EXPECT_EQ(r->explanation, "Bright, lively, and quick");
}

TEST(ScoreComplete, QuotedExplanationRoundTrips) {
  for (const std::string expl : {"a, b", "say \"hi\", then leave", "plain", "comma,at,every,step"}) {
    std::string field = "\"";
    for (char c : expl) field += c == '"' ? std::string("\"\"") : std::string(1, c);
    field += "\"";
    const auto r = parse_scoring_reply("Fun,0.5,low," + field, ScoringPrompt::Complete);
    ASSERT_TRUE(r) << expl;
    EXPECT_EQ(r->explanation, expl);
  }
}

TEST(ScoreComplete, UnparseableExhaustsRetries) {
  std::vector<ScriptLine> lines(4, reply("I think it is rather positive overall."));
  ScriptedProvider p(lines);
  try {
    score_complete(record("Fun", "Nice.", 0.5), p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnparseableCsvReply);
  }
  EXPECT_EQ(p.requests().size(), 4u);
}

TEST(ScoreBaseAdjust, AdjustedBecomesEvaluated) {
  ScriptedProvider p({reply("Undesirable,0.10,0.80,medium,The user seems to like parts of it")});
  const auto s = score_base_adjust(record("Undesirable", "I was disappointed by every update.", 0.10), p);
  EXPECT_DOUBLE_EQ(*s.scoring.base_score, 0.10);
  EXPECT_DOUBLE_EQ(*s.scoring.adjusted_score, 0.80);
  EXPECT_EQ(s.scoring.evaluated_score, *s.scoring.adjusted_score);
  EXPECT_DOUBLE_EQ(s.scoring.abs_diff, std::fabs(0.10 - 0.80));
}

TEST(ScoreBaseAdjust, FourColumnsIsUnparseable) {
  std::vector<ScriptLine> lines(4, reply("Undesirable,0.10,medium,explanation"));
  ScriptedProvider p(lines);
  try {
    score_base_adjust(record("Undesirable", "Bad.", 0.1), p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnparseableCsvReply);
  }
}

TEST(ScoreBaseAdjust, FourColumnsOnlyForComplete) {
  EXPECT_TRUE(parse_scoring_reply("Fun,0.5,high,ok", ScoringPrompt::Complete));
  EXPECT_FALSE(parse_scoring_reply("Fun,0.5,high,ok", ScoringPrompt::BaseAdjust));
  EXPECT_TRUE(parse_scoring_reply("Fun,0.5,0.6,high,ok", ScoringPrompt::BaseAdjust));
}

TEST(FlagAdjustments, InclusiveBoundary) {
  std::vector<ScoredRecord> v{base_adjust(1, 0.10, 0.59), base_adjust(2, 0.10, 0.60), base_adjust(3, 0.90, 0.20)};
  const auto f = flag_large_adjustments(v, 0.50);
  ASSERT_EQ(f.size(), 2u);
  EXPECT_EQ(f[0].id, 3u);
  EXPECT_EQ(f[1].id, 2u);
}

TEST(FlagAdjustments, ZeroAdjustmentsAndWrongPrompt) {
  std::vector<ScoredRecord> v{base_adjust(1, 0.3, 0.3), base_adjust(2, 0.7, 0.7)};
  EXPECT_TRUE(flag_large_adjustments(v).empty());
  v[0].scoring.scoring_prompt = ScoringPrompt::Complete;
  try {
    flag_large_adjustments(v);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::WrongPromptKind);
  }
}

TEST(FlagAdjustments, WorksOnDatasetRows) {
  Dataset d{DatasetRecord(base_adjust(1, 0.2, 0.7)), DatasetRecord(base_adjust(2, 0.2, 0.3))};
  EXPECT_EQ(flag_large_adjustments(d).size(), 1u);
  d.push_back(DatasetRecord(record("Fun", "x", 0.5)));
  EXPECT_THROW(flag_large_adjustments(d), Error);
}

TEST(ScoreDataset, OrderAndUsage) {
  std::vector<GenerationRecord> recs{record("Fun", "a", 0.5, 1), record("Dated", "b", 0.2, 2)};
  ScriptedProvider p({reply("Fun,0.6,high,x"), reply("Dated,0.1,low,y")});
  ScoringOptions o;
  const auto out = score_dataset(recs, p, o);
  ASSERT_EQ(out.records.size(), 2u);
  EXPECT_EQ(out.records[0].gen.id, 1u);
  EXPECT_DOUBLE_EQ(out.records[1].scoring.evaluated_score, 0.1);
  EXPECT_EQ(out.usage.prompt_tokens, 400);
  EXPECT_EQ(out.usage.requests, 2);

  ScriptedProvider again({reply("Fun,0.6,high,x"), reply("Dated,0.1,low,y")});
  const auto out2 = score_dataset(recs, again, o);
  EXPECT_EQ(out.records, out2.records);
}

TEST(ScoreRecord, EmptyReviewRejected) {
  ScriptedProvider p({reply("Fun,0.6,high,x")});
  EXPECT_THROW(score_complete(record("Fun", "", 0.5), p), Error);
}
