#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pdtsynth/error.hpp"
#include "pdtsynth/records.hpp"
#include "pdtsynth/text.hpp"
#include "pdtsynth/tokenize.hpp"
#include "pdtsynth/wordlist.hpp"

namespace pdt {

struct HistogramBin {
  std::string label;
  double lower = 0.0;  // inclusive
  double upper = 0.0;  // inclusive
  std::size_t count = 0;
  double percent = 0.0;
};

/// Target-vs-evaluated comparison for one dataset. Statistics that are
/// undefined for the input (constant series, n < 2) are left empty.
struct AlignmentReport {
  std::size_t n = 0;
  double mean_target = 0.0;
  double mean_evaluated = 0.0;
  std::optional<double> var_target;
  std::optional<double> var_evaluated;
  double mad = 0.0;
  double msd = 0.0;
  std::optional<double> pearson;
  std::optional<double> t_stat;
  std::vector<HistogramBin> diff_histogram;
  std::vector<HistogramBin> score_histogram;
};

namespace detail {

inline int hundredths(double v) { return static_cast<int>(std::lround(v * 100.0)); }

inline void check_unit_interval(std::span<const double> xs, const char* what) {
  for (double x : xs)
    if (!(x >= 0.0 && x <= 1.0)) throw Error(ErrorCode::OutOfRange, std::string(what) + " value outside [0, 1]");
}

inline void fill_percent(std::vector<HistogramBin>& bins, std::size_t n) {
  for (auto& b : bins) b.percent = n ? 100.0 * static_cast<double>(b.count) / static_cast<double>(n) : 0.0;
}

}  // namespace detail

/// Bins of absolute differences: exact 0, then 0.01-0.05, 0.06-0.10, ...,
/// 0.96-1.00 (inclusive bounds), after rounding each value to 2 decimals.
inline std::vector<HistogramBin> diff_histogram(std::span<const double> abs_diffs) {
  std::vector<HistogramBin> bins;
  bins.push_back({"0", 0.0, 0.0, 0, 0.0});
  for (int k = 0; k < 20; ++k) {
    const int lo = 5 * k + 1, hi = 5 * k + 5;
    bins.push_back({text::format_fixed(lo / 100.0, 2) + "-" + text::format_fixed(hi / 100.0, 2), lo / 100.0,
                    hi / 100.0, 0, 0.0});
  }
  for (double d : abs_diffs) {
    if (!std::isfinite(d)) throw Error(ErrorCode::OutOfRange, "difference is not finite");
    const int h = detail::hundredths(d);
    if (h < 0 || h > 100) throw Error(ErrorCode::OutOfRange, "difference " + text::format_double(d) + " outside [0, 1]");
    ++bins[h == 0 ? 0 : static_cast<std::size_t>((h - 1) / 5 + 1)].count;
  }
  detail::fill_percent(bins, abs_diffs.size());
  return bins;
}

/// 0.05-wide bins of scores (2-decimal values): 0.00-0.04, 0.05-0.09, ..., 0.95-1.00.
inline std::vector<HistogramBin> score_histogram(std::span<const double> scores) {
  std::vector<HistogramBin> bins;
  for (int k = 0; k < 20; ++k) {
    const int lo = 5 * k, hi = k == 19 ? 100 : 5 * k + 4;
    bins.push_back({text::format_fixed(lo / 100.0, 2) + "-" + text::format_fixed(hi / 100.0, 2), lo / 100.0,
                    hi / 100.0, 0, 0.0});
  }
  for (double s : scores) {
    if (!std::isfinite(s)) throw Error(ErrorCode::OutOfRange, "score is not finite");
    const int h = detail::hundredths(s);
    if (h < 0 || h > 100) throw Error(ErrorCode::OutOfRange, "score " + text::format_double(s) + " outside [0, 1]");
    ++bins[static_cast<std::size_t>(std::min(h / 5, 19))].count;
  }
  detail::fill_percent(bins, scores.size());
  return bins;
}

/// Sample correlation by the two-pass formula. Empty when either series is
/// constant or shorter than 2. No range restriction.
inline std::optional<double> pearson_correlation(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size())
    throw Error(ErrorCode::LengthMismatch, std::to_string(xs.size()) + " vs " + std::to_string(ys.size()) + " values");
  const std::size_t n = xs.size();
  if (n < 2) return std::nullopt;
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / static_cast<double>(n), my = sy / static_cast<double>(n);
  double sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (!(sxx > 0) || !(syy > 0)) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

/// Means, sample variances (n-1), MAD, MSD, Pearson r and the paired t
/// statistic mean(d) / (sd(d)/sqrt(n)) with d = target - evaluated.
inline AlignmentReport compute_alignment(std::span<const double> targets, std::span<const double> evaluated) {
  if (targets.size() != evaluated.size())
    throw Error(ErrorCode::LengthMismatch, std::to_string(targets.size()) + " targets vs " +
                                               std::to_string(evaluated.size()) + " evaluated scores");
  if (targets.empty()) throw Error(ErrorCode::InvalidArgument, "alignment of empty series");
  detail::check_unit_interval(targets, "target");
  detail::check_unit_interval(evaluated, "evaluated");

  const std::size_t n = targets.size();
  const double nd = static_cast<double>(n);
  AlignmentReport r;
  r.n = n;

  double st = 0, se = 0, sd = 0, sabs = 0, ssq = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = targets[i] - evaluated[i];
    st += targets[i];
    se += evaluated[i];
    sd += d;
    sabs += std::fabs(d);
    ssq += d * d;
  }
  r.mean_target = st / nd;
  r.mean_evaluated = se / nd;
  r.mad = sabs / nd;
  r.msd = ssq / nd;
  const double mean_d = sd / nd;

  double sxx = 0, syy = 0, sdd = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = targets[i] - r.mean_target;
    const double dy = evaluated[i] - r.mean_evaluated;
    const double dd = (targets[i] - evaluated[i]) - mean_d;
    sxx += dx * dx;
    syy += dy * dy;
    sdd += dd * dd;
  }
  if (n >= 2) {
    r.var_target = sxx / (nd - 1);
    r.var_evaluated = syy / (nd - 1);
    const double sd_d = std::sqrt(sdd / (nd - 1));
    if (sd_d > 0) r.t_stat = mean_d / (sd_d / std::sqrt(nd));
  }
  r.pearson = pearson_correlation(targets, evaluated);

  std::vector<double> diffs(n);
  for (std::size_t i = 0; i < n; ++i) diffs[i] = std::fabs(targets[i] - evaluated[i]);
  r.diff_histogram = diff_histogram(diffs);
  r.score_histogram = score_histogram(evaluated);
  return r;
}

/// Alignment over the scored rows of a dataset (unscored rows are skipped).
inline AlignmentReport compute_alignment(const Dataset& data) {
  std::vector<double> t, e;
  for (const auto& r : data) {
    if (!r.scoring) continue;
    t.push_back(r.gen.target_score);
    e.push_back(r.scoring->evaluated_score);
  }
  if (t.empty()) throw Error(ErrorCode::SchemaMismatch, "dataset has no scored rows");
  return compute_alignment(t, e);
}

struct WordUsageReport {
  std::size_t n = 0;
  std::size_t list_size = 0;
  std::size_t distinct_used = 0;
  double coverage_fraction = 0.0;
  std::vector<std::pair<std::string, std::size_t>> top_k;
  std::vector<std::pair<std::string, std::size_t>> invalid_words;
  /// Every valid word with its count, most frequent first.
  std::vector<std::pair<std::string, std::size_t>> counts;
};

namespace detail {

inline void sort_counts(std::vector<std::pair<std::string, std::size_t>>& v) {
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
}

}  // namespace detail

/// Word frequencies over canonical list entries. Words not in the list are
/// tabulated separately under their trimmed spelling.
inline WordUsageReport word_usage(const Dataset& data, const WordList& list, std::size_t top_k = 5) {
  if (data.empty()) throw Error(ErrorCode::InvalidArgument, "word usage of an empty dataset");
  std::map<std::string, std::size_t> valid, invalid;
  for (const auto& r : data) {
    const auto choice = list.validate_choice(r.gen.word);
    if (choice.valid)
      ++valid[choice.canonical->text];
    else
      ++invalid[std::string(text::strip_quotes(r.gen.word))];
  }
  WordUsageReport out;
  out.n = data.size();
  out.list_size = list.size();
  out.distinct_used = valid.size();
  out.coverage_fraction = static_cast<double>(valid.size()) / static_cast<double>(list.size());
  out.counts.assign(valid.begin(), valid.end());
  detail::sort_counts(out.counts);
  out.top_k.assign(out.counts.begin(), out.counts.begin() + static_cast<std::ptrdiff_t>(std::min(top_k, out.counts.size())));
  out.invalid_words.assign(invalid.begin(), invalid.end());
  detail::sort_counts(out.invalid_words);
  return out;
}

struct PrefixShare {
  std::string prefix;
  std::size_t count = 0;
  double fraction = 0.0;
};

/// Share of reviews opening with each leading token sequence (lowercased
/// word tokens), most common first, ties alphabetical.
template <class Range>
std::vector<PrefixShare> prefix_redundancy(const Range& reviews, std::size_t prefix_tokens = 2) {
  if (prefix_tokens == 0) throw Error(ErrorCode::InvalidArgument, "prefix length must be positive");
  std::map<std::string, std::size_t> counts;
  std::size_t n = 0;
  for (const auto& review : reviews) {
    const auto tokens = tokenize(review);
    if (tokens.empty()) continue;
    std::string key;
    for (std::size_t k = 0; k < std::min(prefix_tokens, tokens.size()); ++k) {
      if (k) key += ' ';
      key += tokens[k];
    }
    ++counts[key];
    ++n;
  }
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "no non-empty reviews");
  std::vector<PrefixShare> out;
  for (auto& [k, c] : counts) out.push_back({k, c, static_cast<double>(c) / static_cast<double>(n)});
  std::sort(out.begin(), out.end(), [](const PrefixShare& a, const PrefixShare& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.prefix < b.prefix;
  });
  return out;
}

}  // namespace pdt
