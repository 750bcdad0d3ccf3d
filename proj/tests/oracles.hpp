#pragma once

// Reference implementations used to check the library. Each one takes a
// deliberately different route from the code under test.

#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace oracle {

struct AlignmentStats {
  double mean_t = 0, mean_e = 0, var_t = 0, var_e = 0, mad = 0, msd = 0, pearson = 0, t_stat = 0;
};

// Long-double accumulation, summing from the last element down; Pearson from
// raw moments rather than centered sums.
inline AlignmentStats alignment(const std::vector<double>& t, const std::vector<double>& e) {
  const std::size_t n = t.size();
  const long double N = static_cast<long double>(n);
  long double st = 0, se = 0, stt = 0, see = 0, ste = 0, sabs = 0, ssq = 0, sd = 0, sdd = 0;
  for (std::size_t k = n; k-- > 0;) {
    const long double a = t[k], b = e[k], d = a - b;
    st += a;
    se += b;
    stt += a * a;
    see += b * b;
    ste += a * b;
    sabs += std::fabs(d);
    ssq += d * d;
    sd += d;
    sdd += d * d;
  }
  AlignmentStats s;
  s.mean_t = static_cast<double>(st / N);
  s.mean_e = static_cast<double>(se / N);
  const long double cov_tt = stt - st * st / N;
  const long double cov_ee = see - se * se / N;
  const long double cov_te = ste - st * se / N;
  s.var_t = static_cast<double>(cov_tt / (N - 1));
  s.var_e = static_cast<double>(cov_ee / (N - 1));
  s.mad = static_cast<double>(sabs / N);
  s.msd = static_cast<double>(ssq / N);
  s.pearson = static_cast<double>(cov_te / std::sqrt(cov_tt * cov_ee));
  const long double mean_d = sd / N;
  const long double var_d = (sdd - sd * sd / N) / (N - 1);
  s.t_stat = static_cast<double>(mean_d / (std::sqrt(var_d) / std::sqrt(N)));
  return s;
}

inline double pearson_of(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  long double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += static_cast<long double>(x[i]) * x[i];
    syy += static_cast<long double>(y[i]) * y[i];
    sxy += static_cast<long double>(x[i]) * y[i];
  }
  const long double N = static_cast<long double>(n);
  return static_cast<double>((sxy - sx * sy / N) / std::sqrt((sxx - sx * sx / N) * (syy - sy * sy / N)));
}

// Textbook O(|a||b|) dynamic program.
template <class Seq>
std::size_t lcs_dp(const Seq& a, const Seq& b) {
  std::vector<std::vector<std::size_t>> t(a.size() + 1, std::vector<std::size_t>(b.size() + 1, 0));
  for (std::size_t i = 1; i <= a.size(); ++i)
    for (std::size_t j = 1; j <= b.size(); ++j)
      t[i][j] = a[i - 1] == b[j - 1] ? t[i - 1][j - 1] + 1 : std::max(t[i - 1][j], t[i][j - 1]);
  return t[a.size()][b.size()];
}

// Mean ROUGE-L F1 over unordered pairs. F1 = 2PR/(P+R) reduces to
// 2L/(|a|+|b|); sums run row by row in the library's order so the two
// results can be compared bit for bit.
template <class Seq>
double homogenization(const std::vector<Seq>& docs) {
  const std::size_t n = docs.size();
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double row = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::size_t l = lcs_dp(docs[i], docs[j]);
      row += l == 0 ? 0.0 : 2.0 * static_cast<double>(l) / static_cast<double>(docs[i].size() + docs[j].size());
    }
    total += row;
  }
  return total / (static_cast<double>(n) * static_cast<double>(n - 1) / 2.0);
}

// Distinct/total n-grams for n = 1..4 over string tokens.
inline double ngram_diversity(const std::vector<std::vector<std::string>>& docs) {
  double score = 0;
  for (std::size_t n = 1; n <= 4; ++n) {
    std::set<std::vector<std::string>> distinct;
    std::size_t total = 0;
    for (const auto& d : docs)
      for (std::size_t i = 0; i + n <= d.size(); ++i) {
        distinct.insert(std::vector<std::string>(d.begin() + static_cast<std::ptrdiff_t>(i),
                                                 d.begin() + static_cast<std::ptrdiff_t>(i + n)));
        ++total;
      }
    if (total) score += static_cast<double>(distinct.size()) / static_cast<double>(total);
  }
  return score;
}

// Dollars for a token mix; prices are per million tokens.
inline long double price(long long in, long long out, long double in_per_m, long double out_per_m) {
  return static_cast<long double>(in) * in_per_m / 1'000'000.0L + static_cast<long double>(out) * out_per_m / 1'000'000.0L;
}

}  // namespace oracle
