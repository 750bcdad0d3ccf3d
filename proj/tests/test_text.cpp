#include <gtest/gtest.h>

#include <set>

#include "pdtsynth/csv.hpp"
#include "pdtsynth/deflate.hpp"
#include "pdtsynth/pos_tagger.hpp"
#include "pdtsynth/rng.hpp"
#include "pdtsynth/text.hpp"
#include "pdtsynth/tokenize.hpp"
#include "pdtsynth/worker_pool.hpp"

using namespace pdt;

TEST(Text, StripQuotesKeepsLeadingDot) {
  EXPECT_EQ(text::strip_quotes("  \"Confusing.\" "), "Confusing");
  EXPECT_EQ(text::strip_quotes("**Dated**"), "Dated");
  EXPECT_EQ(text::strip_quotes("\xE2\x80\x9C" "Fun" "\xE2\x80\x9D"), "Fun");
  EXPECT_EQ(text::strip_quotes(".5"), ".5");
}

TEST(Text, NumberFormatting) {
  EXPECT_EQ(text::format_fixed(0.3, 2), "0.30");
  EXPECT_EQ(text::format_fixed(-0.0001, 2), "0.00");
  EXPECT_EQ(text::format_double(0.1), "0.1");
  EXPECT_EQ(*text::parse_double("+0.75"), 0.75);
  EXPECT_FALSE(text::parse_double("0.7x"));
  EXPECT_DOUBLE_EQ(text::round_to(0.0564993, 2), 0.06);
  for (double v : {0.1, 1.0 / 3.0, 2.5e-17, 123456.789}) EXPECT_EQ(*text::parse_double(text::format_double(v)), v);
}

TEST(Csv, QuotesOnlyWhenNeeded) {
  EXPECT_EQ(csv::format_row({"a", "b c", "x,y", "say \"hi\""}), "a,b c,\"x,y\",\"say \"\"hi\"\"\"\n");
}

TEST(Csv, QuotedFieldsSpanLines) {
  const auto rows = csv::parse_document("h1,h2\n\"multi\nline\",2\n\n3,\"q\"\"\"\n");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1].fields[0], "multi\nline");
  EXPECT_EQ(rows[1].line, 2u);
  EXPECT_EQ(rows[2].fields[1], "q\"");
  EXPECT_EQ(rows[2].line, 5u);
}

TEST(Csv, MalformedRecordNamesLine) {
  try {
    csv::parse_document("a,b\n1,\"open\n", "f.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SchemaMismatch);
    EXPECT_NE(std::string(e.what()).find("f.csv:2"), std::string::npos);
  }
}

TEST(Tokenize, LowercasesAndDropsPunctuation) {
  EXPECT_EQ(tokenize("The cat, sat!"), (std::vector<std::string>{"the", "cat", "sat"}));
  EXPECT_EQ(tokenize("I don't know; 3.5 or 1,000?"),
            (std::vector<std::string>{"i", "don't", "know", "3.5", "or", "1,000"}));
  EXPECT_EQ(tokenize("Caf\xC3\x89 \xCE\x91\xCE\x92"), (std::vector<std::string>{"caf\xC3\xA9", "\xCE\xB1\xCE\xB2"}));
  EXPECT_TRUE(tokenize("  ... -- ").empty());
}

TEST(Tokenize, CorpusSharesVocabulary) {
  std::vector<std::string> docs{"a b a", "b c"};
  const auto c = tokenize_corpus(docs);
  EXPECT_EQ(c.vocab.size(), 3u);
  EXPECT_EQ(c.docs[0][0], c.docs[0][2]);
  EXPECT_EQ(c.docs[0][1], c.docs[1][0]);
  EXPECT_EQ(c.token_count(), 5u);
}

TEST(Rng, StreamsAreIndependentOfOrder) {
  auto a = stream_for(7, 3);
  auto b = stream_for(7, 3);
  auto c = stream_for(7, 4);
  const auto x = a.next_u64();
  EXPECT_EQ(x, b.next_u64());
  EXPECT_NE(x, c.next_u64());
}

TEST(Rng, SampleIndicesDistinct) {
  Rng r(1);
  for (int t = 0; t < 100; ++t) {
    const auto idx = r.sample_indices(20, 20);
    EXPECT_EQ(std::set<std::size_t>(idx.begin(), idx.end()).size(), 20u);
  }
}

TEST(Rng, BelowIsInRange) {
  Rng r(9);
  for (int i = 0; i < 10000; ++i) EXPECT_LT(r.below(118), 118u);
}

TEST(Deflate, RawStreamSizes) {
  EXPECT_GT(deflate_size(""), 0u);
  std::string rep(10000, 'a');
  EXPECT_GT(compression_ratio_of(rep), 50.0);
}

TEST(WorkerPool, RethrowsLowestFailingIndex) {
  try {
    parallel_for(100, 4, [](std::size_t i) {
      if (i == 17 || i == 60) throw std::runtime_error("idx " + std::to_string(i));
    });
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "idx 17");
  }
}

TEST(PosTagger, TagsCommonWords) {
  const auto t = RuleTagger::builtin();
  const std::vector<std::string> toks{"the", "software", "quickly", "crashed", "and", "i", "was", "frustrated", "3"};
  const auto tags = t.tag(toks);
  ASSERT_EQ(tags.size(), toks.size());
  EXPECT_EQ(tags[0], UposTag::DET);
  EXPECT_EQ(tags[1], UposTag::NOUN);
  EXPECT_EQ(tags[2], UposTag::ADV);
  EXPECT_EQ(tags[3], UposTag::VERB);
  EXPECT_EQ(tags[4], UposTag::CCONJ);
  EXPECT_EQ(tags[5], UposTag::PRON);
  EXPECT_EQ(tags[8], UposTag::NUM);
}
