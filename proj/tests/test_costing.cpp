#include <gtest/gtest.h>

#include <random>

#include "pdtsynth/costing.hpp"
#include "oracles.hpp"

using namespace pdt;

namespace {

struct MethodRun {
  const char* method;
  double seconds;
  std::int64_t in, out;
  double table_price;
};

// Published per-method totals for 1000 generated rows.
constexpr MethodRun kRuns[] = {
    {"Word+Review", 1531, 126814, 62462, 0.06},
    {"Review+Word", 1792, 105845, 96189, 0.07},
    {"Supply-Word", 3084, 96824, 161074, 0.11},
};

}  // namespace

TEST(Costing, PerMethodPricesMatchPublishedTable) {
  for (const auto& r : kRuns) {
    const auto c = tally(1000, r.seconds, r.in, r.out, price_presets::gpt_4o_mini());
    EXPECT_NEAR(c.price_dollars, r.table_price, 0.005) << r.method;
    EXPECT_EQ(c.price_cents(), r.table_price) << r.method;
    EXPECT_NEAR(c.price_dollars, static_cast<double>(oracle::price(r.in, r.out, 0.15L, 0.60L)), 1e-15) << r.method;
    EXPECT_EQ(c.total_tokens, r.in + r.out);
  }
}

TEST(Costing, WordReviewMillionRowProjection) {
  const auto c = tally(1000, 1531, 126814, 62462, price_presets::gpt_4o_mini());
  const auto p = project(c, 1'000'000);
  EXPECT_NEAR(p.price_token_basis, 56.4993, 1e-4);
  EXPECT_NEAR(p.price_token_basis, 56.49, 0.01);
  EXPECT_NEAR(p.price_rounded_basis, 60.0, 1e-9);
  EXPECT_NEAR(p.wall_time_days(), 17.72, 0.01);
  EXPECT_EQ(p.input_tokens, 126'814'000);
  EXPECT_EQ(p.output_tokens, 62'462'000);
}

TEST(Costing, RepricedProjection) {
  const auto c = tally(1000, 1531, 126814, 62462, price_presets::gpt_4o_mini());
  const auto p = project(c, 1'000'000, price_presets::gpt_4o());
  EXPECT_EQ(p.model, "gpt-4o");
  EXPECT_NEAR(p.price_token_basis, 941.655, 1e-6);
  // The cheaper sheet is 6% of the larger one on both token kinds.
  EXPECT_NEAR(c.price_dollars * 1000.0 / p.price_token_basis, 0.06, 1e-12);
}

TEST(Costing, LinearInTokens) {
  std::mt19937_64 gen(4);
  std::uniform_int_distribution<std::int64_t> tok(0, 5'000'000);
  const auto sheet = price_presets::gpt_4o_mini();
  for (int i = 0; i < 1000; ++i) {
    const auto a_in = tok(gen), a_out = tok(gen), b_in = tok(gen), b_out = tok(gen);
    const double sum = sheet.price(a_in + b_in, a_out + b_out);
    const double parts = sheet.price(a_in, a_out) + sheet.price(b_in, b_out);
    EXPECT_NEAR(sum, parts, 1e-12 * std::max(1.0, sum));
  }
  EXPECT_EQ(sheet.price(0, 0), 0.0);
}

TEST(Costing, Presets) {
  EXPECT_EQ(price_presets::by_name("gpt-4o-mini")->input_per_million, 0.15);
  EXPECT_EQ(price_presets::by_name("gpt-4o")->output_per_million, 10.00);
  EXPECT_FALSE(price_presets::by_name("gpt-5"));
  EXPECT_EQ(format_dollars(56.4993), "$56.50");
  EXPECT_EQ(format_dollars(0.0565, 4), "$0.0565");
}

TEST(Costing, ZeroRowsCannotProject) {
  const auto c = tally(0, 0, 0, 0, price_presets::gpt_4o_mini());
  try {
    project(c, 10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroRows);
  }
}

TEST(Costing, MissingUsageOnDataset) {
  GenerationRecord g;
  g.id = 7;
  g.review = "r";
  g.prompt_tokens = 100;
  g.completion_tokens = 20;
  Dataset d{DatasetRecord(g)};
  EXPECT_EQ(tally(d, 1.0, price_presets::gpt_4o_mini()).input_tokens, 100);
  g.prompt_tokens = -1;
  d.emplace_back(g);
  try {
    tally(d, 1.0, price_presets::gpt_4o_mini());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingUsage);
  }
}

TEST(Costing, InvalidPriceSheetRejected) {
  PriceSheet bad{"x", -1.0, 0.5};
  EXPECT_THROW(tally(1, 1, 1, 1, bad), Error);
}
