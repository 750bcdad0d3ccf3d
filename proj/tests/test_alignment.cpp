#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "pdtsynth/alignment.hpp"
#include "oracles.hpp"

using namespace pdt;

TEST(Alignment, IdentitySeries) {
  const std::vector<double> t{0.1, 0.5, 0.9};
  const auto r = compute_alignment(t, t);
  EXPECT_EQ(r.mad, 0.0);
  EXPECT_EQ(r.msd, 0.0);
  ASSERT_TRUE(r.pearson);
  EXPECT_NEAR(*r.pearson, 1.0, 1e-15);
  EXPECT_FALSE(r.t_stat);
}

TEST(Alignment, PairedTStatistic) {
  const std::vector<double> t{0.5, 0.7, 0.9};
  const std::vector<double> e{0.4, 0.5, 0.6};
  const auto r = compute_alignment(t, e);
  ASSERT_TRUE(r.t_stat);
  EXPECT_NEAR(*r.t_stat, 0.2 / (0.1 / std::sqrt(3.0)), 1e-9);
  EXPECT_NEAR(*r.t_stat, 3.4641, 1e-4);
}

TEST(Alignment, ConstantSeriesLeavesPearsonUndefined) {
  const std::vector<double> t{0.2, 0.4, 0.6};
  const std::vector<double> e{0.5, 0.5, 0.5};
  const auto r = compute_alignment(t, e);
  EXPECT_FALSE(r.pearson);
  ASSERT_TRUE(r.var_evaluated);
  EXPECT_EQ(*r.var_evaluated, 0.0);
}

TEST(Alignment, SingleRow) {
  const auto r = compute_alignment(std::vector<double>{0.3}, std::vector<double>{0.4});
  EXPECT_EQ(r.n, 1u);
  EXPECT_FALSE(r.var_target);
  EXPECT_FALSE(r.t_stat);
  EXPECT_FALSE(r.pearson);
}

TEST(Alignment, Errors) {
  auto code = [](std::vector<double> a, std::vector<double> b) {
    try {
      compute_alignment(a, b);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  EXPECT_EQ(code({0.1, 0.2}, {0.1}), ErrorCode::LengthMismatch);
  EXPECT_EQ(code({0.1, 1.2}, {0.1, 0.2}), ErrorCode::OutOfRange);
  EXPECT_EQ(code({0.1, 0.2}, {-0.1, 0.2}), ErrorCode::OutOfRange);
}

TEST(Alignment, MatchesBruteForceOracle) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> t(10000), e(10000);
    for (std::size_t i = 0; i < t.size(); ++i) {
      t[i] = std::round(u(gen) * 100) / 100;
      e[i] = std::clamp(t[i] + (u(gen) - 0.45) * 0.4, 0.0, 1.0);
    }
    const auto r = compute_alignment(t, e);
    const auto o = oracle::alignment(t, e);
    EXPECT_NEAR(r.mean_target, o.mean_t, 1e-9);
    EXPECT_NEAR(r.mean_evaluated, o.mean_e, 1e-9);
    EXPECT_NEAR(*r.var_target, o.var_t, 1e-9);
    EXPECT_NEAR(*r.var_evaluated, o.var_e, 1e-9);
    EXPECT_NEAR(r.mad, o.mad, 1e-9);
    EXPECT_NEAR(r.msd, o.msd, 1e-9);
    EXPECT_NEAR(*r.pearson, o.pearson, 1e-9);
    EXPECT_NEAR(*r.t_stat, o.t_stat, 1e-9 * std::max(1.0, std::fabs(o.t_stat)));
    EXPECT_LE(r.msd, r.mad);
  }
}

TEST(Alignment, PearsonAffineInvariance) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> t(1000), e(1000);
    for (std::size_t i = 0; i < t.size(); ++i) {
      t[i] = u(gen);
      e[i] = std::clamp(0.8 * t[i] + 0.2 * u(gen), 0.0, 1.0);
    }
    const double base = *compute_alignment(t, e).pearson;
    std::vector<double> t2(t), e2(e);
    for (auto& x : t2) x = 2 * x + 0.1;
    for (auto& x : e2) x = 2 * x + 0.1;
    EXPECT_NEAR(*pearson_correlation(t2, e), base, 1e-12);
    EXPECT_NEAR(*pearson_correlation(t, e2), base, 1e-12);
    EXPECT_NEAR(*pearson_correlation(t2, e2), base, 1e-12);
  }
}

TEST(DiffHistogram, OneValuePerBin) {
  const auto h = diff_histogram(std::vector<double>{0.00, 0.03, 0.07});
  ASSERT_EQ(h.size(), 21u);
  EXPECT_EQ(h[0].label, "0");
  EXPECT_EQ(h[0].count, 1u);
  EXPECT_EQ(h[1].label, "0.01-0.05");
  EXPECT_EQ(h[1].count, 1u);
  EXPECT_EQ(h[2].label, "0.06-0.10");
  EXPECT_EQ(h[2].count, 1u);
  EXPECT_EQ(h[20].label, "0.96-1.00");
}

TEST(DiffHistogram, InclusiveUpperBounds) {
  const auto h = diff_histogram(std::vector<double>{0.05, 0.06, 0.1, 1.0, 0.96, 0.95});
  EXPECT_EQ(h[1].count, 1u);
  EXPECT_EQ(h[2].count, 2u);
  EXPECT_EQ(h[19].count, 1u);
  EXPECT_EQ(h[20].count, 2u);
}

TEST(DiffHistogram, FloatingDifferencesRoundFirst) {
  // 0.3 - 0.25 is 0.04999999999999999 in binary floating point.
  const double d = std::fabs(0.3 - 0.25);
  EXPECT_EQ(diff_histogram(std::vector<double>{d})[1].count, 1u);
  EXPECT_EQ(diff_histogram(std::vector<double>{std::fabs(0.36 - 0.3)})[2].count, 1u);
}

TEST(DiffHistogram, AllZerosAndPercentSum) {
  const auto h = diff_histogram(std::vector<double>(7, 0.0));
  EXPECT_DOUBLE_EQ(h[0].percent, 100.0);
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(997);
  for (auto& x : v) x = u(gen);
  const auto h2 = diff_histogram(v);
  double sum = 0;
  std::size_t n = 0;
  for (const auto& b : h2) {
    sum += b.percent;
    n += b.count;
  }
  EXPECT_NEAR(sum, 100.0, 0.01);
  EXPECT_EQ(n, v.size());
  EXPECT_THROW(diff_histogram(std::vector<double>{1.2}), Error);
}

TEST(ScoreHistogram, Bins) {
  const auto h = score_histogram(std::vector<double>{0.0, 0.04, 0.05, 0.94, 0.95, 1.0});
  ASSERT_EQ(h.size(), 20u);
  EXPECT_EQ(h[0].label, "0.00-0.04");
  EXPECT_EQ(h[0].count, 2u);
  EXPECT_EQ(h[1].count, 1u);
  EXPECT_EQ(h[18].count, 1u);
  EXPECT_EQ(h[19].label, "0.95-1.00");
  EXPECT_EQ(h[19].count, 2u);
}

namespace {

Dataset words_dataset(const std::vector<std::string>& words) {
  Dataset d;
  std::uint64_t id = 0;
  for (const auto& w : words) {
    GenerationRecord g;
    g.id = ++id;
    g.word = w;
    g.review = "r";
    d.emplace_back(g);
  }
  return d;
}

}  // namespace

TEST(WordUsage, SingleWord) {
  const auto list = WordList::builtin();
  const auto r = word_usage(words_dataset({"Dated", "Dated", "dated"}), list);
  EXPECT_EQ(r.distinct_used, 1u);
  ASSERT_EQ(r.top_k.size(), 1u);
  EXPECT_EQ(r.top_k[0], (std::pair<std::string, std::size_t>{"Dated", 3}));
  EXPECT_TRUE(r.invalid_words.empty());
}

TEST(WordUsage, TiesAlphabeticalAndInvalidSeparate) {
  const auto list = WordList::builtin();
  const auto r = word_usage(words_dataset({"Fun", "Dated", "Inspirational", "Fun", "Dated", "Calm"}), list, 2);
  ASSERT_EQ(r.top_k.size(), 2u);
  EXPECT_EQ(r.top_k[0].first, "Dated");
  EXPECT_EQ(r.top_k[1].first, "Fun");
  ASSERT_EQ(r.invalid_words.size(), 1u);
  EXPECT_EQ(r.invalid_words[0].first, "Inspirational");
  std::size_t total = 0;
  for (const auto& [w, c] : r.counts) total += c;
  for (const auto& [w, c] : r.invalid_words) total += c;
  EXPECT_EQ(total, r.n);
  EXPECT_LE(r.distinct_used, 118u);
  EXPECT_NEAR(r.coverage_fraction, 3.0 / 118.0, 1e-15);
}

TEST(PrefixRedundancy, Fractions) {
  const std::vector<std::string> reviews{"I recently tried it.", "i recently bought it", "The app is slow.",
                                         "Great value."};
  const auto p = prefix_redundancy(reviews);
  ASSERT_FALSE(p.empty());
  EXPECT_EQ(p[0].prefix, "i recently");
  EXPECT_DOUBLE_EQ(p[0].fraction, 0.5);

  const std::vector<std::string> distinct{"a b", "c d", "e f"};
  EXPECT_DOUBLE_EQ(prefix_redundancy(distinct)[0].fraction, 1.0 / 3.0);
}
