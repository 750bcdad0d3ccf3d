#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "pdtsynth/deflate.hpp"
#include "pdtsynth/error.hpp"
#include "pdtsynth/lcs.hpp"
#include "pdtsynth/pos_tagger.hpp"
#include "pdtsynth/tokenize.hpp"
#include "pdtsynth/worker_pool.hpp"

namespace pdt {

struct DiversityOptions {
  int max_ngram = 4;
  std::size_t parallelism = 4;
  bool skip_hs = false;
};

struct DiversityReport {
  std::size_t documents = 0;
  std::size_t word_count = 0;
  double cr = 0.0;
  double cr_pos = 0.0;
  std::optional<double> hs;  // absent when skipped
  double nds = 0.0;
  double cr_seconds = 0.0;
  double cr_pos_seconds = 0.0;
  double hs_seconds = 0.0;
  double nds_seconds = 0.0;
};

namespace detail {

inline std::string join_lines(std::span<const std::string> docs) {
  std::string out;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (i) out += '\n';
    out += docs[i];
  }
  return out;
}

struct NgramHash {
  std::size_t operator()(const std::array<std::uint32_t, 4>& g) const noexcept {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (auto v : g) h = (h ^ v) * 0x100000001B3ULL;
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

/// Raw document bytes joined by LF, over their DEFLATE (level 6) size.
inline double compression_ratio(std::span<const std::string> docs) {
  const auto joined = detail::join_lines(docs);
  if (docs.empty() || joined.empty()) throw Error(ErrorCode::EmptyCorpus, "compression ratio of an empty corpus");
  return compression_ratio_of(joined);
}

/// Space-separated tag sequences (one line per document) over their DEFLATE size.
inline double pos_compression_ratio(std::span<const std::string> docs, const PosTagger& tagger) {
  if (docs.empty()) throw Error(ErrorCode::EmptyCorpus, "POS compression ratio of an empty corpus");
  std::string joined;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (i) joined += '\n';
    const auto tokens = tokenize(docs[i]);
    const auto tags = tagger.tag(tokens);
    for (std::size_t k = 0; k < tags.size(); ++k) {
      if (k) joined += ' ';
      joined += to_string(tags[k]);
    }
  }
  if (joined.find_first_not_of('\n') == std::string::npos)
    throw Error(ErrorCode::EmptyCorpus, "corpus has no tokens to tag");
  return compression_ratio_of(joined);
}

/// Token-level ROUGE-L F1 of two sequences with LCS length `lcs`:
/// P = L/|a|, R = L/|b|, F1 = 2PR/(P+R) = 2L/(|a|+|b|). Symmetric.
inline double rouge_l_f1(std::size_t lcs, std::size_t len_a, std::size_t len_b) noexcept {
  if (lcs == 0) return 0.0;
  return 2.0 * static_cast<double>(lcs) / static_cast<double>(len_a + len_b);
}

namespace detail {

// Hands rows [0, rows) to `workers` threads, each with its own LCS engine.
template <class Fn>
void for_each_row(const TokenizedCorpus& corpus, std::size_t rows, std::size_t workers, Fn&& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, rows));
  std::atomic<std::size_t> next{0};
  parallel_for(workers, workers, [&](std::size_t) {
    BitLcs lcs(corpus.vocab.size());
    for (std::size_t i = next.fetch_add(1); i < rows; i = next.fetch_add(1)) fn(lcs, i);
  });
}

}  // namespace detail

/// LCS length of every unordered pair (i < j), row-major: (0,1), (0,2), ..., (1,2), ...
inline std::vector<std::size_t> pairwise_lcs(const TokenizedCorpus& corpus, std::size_t workers = 1) {
  const std::size_t n = corpus.docs.size();
  std::vector<std::size_t> out(n < 2 ? 0 : n * (n - 1) / 2);
  if (n < 2) return out;
  detail::for_each_row(corpus, n - 1, workers, [&](BitLcs& lcs, std::size_t i) {
    const std::size_t offset = i * n - i * (i + 1) / 2;
    lcs.prepare(corpus.docs[i]);
    for (std::size_t j = i + 1; j < n; ++j) out[offset + (j - i - 1)] = lcs.length(corpus.docs[j]);
  });
  return out;
}

/// Homogenization score: mean ROUGE-L F1 over all unordered document pairs.
/// Each row's sum runs in j order and rows are added in i order, so the
/// result does not depend on the number of workers.
inline double homogenization_rouge_l(const TokenizedCorpus& corpus, std::size_t workers = 1) {
  const std::size_t n = corpus.docs.size();
  if (n == 0) throw Error(ErrorCode::EmptyCorpus, "homogenization score of an empty corpus");
  if (n == 1) throw Error(ErrorCode::SingleDocument, "homogenization score needs at least two documents");
  std::vector<double> row_sums(n - 1, 0.0);
  detail::for_each_row(corpus, n - 1, workers, [&](BitLcs& lcs, std::size_t i) {
    const auto& a = corpus.docs[i];
    lcs.prepare(a);
    double sum = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto& b = corpus.docs[j];
      sum += rouge_l_f1(lcs.length(b), a.size(), b.size());
    }
    row_sums[i] = sum;
  });
  double total = 0.0;
  for (double s : row_sums) total += s;
  return total / (static_cast<double>(n) * static_cast<double>(n - 1) / 2.0);
}

inline double homogenization_rouge_l(std::span<const std::string> docs, std::size_t workers = 1) {
  return homogenization_rouge_l(tokenize_corpus(docs), workers);
}

/// Sum over n = 1..max_n of distinct/total n-grams, corpus-wide. N-grams never
/// cross document boundaries; an order with no n-grams at all contributes 0.
inline double ngram_diversity(const TokenizedCorpus& corpus, int max_n = 4) {
  if (corpus.docs.empty() || corpus.token_count() == 0)
    throw Error(ErrorCode::EmptyCorpus, "n-gram diversity of an empty corpus");
  if (max_n < 1 || max_n > 4) throw Error(ErrorCode::InvalidArgument, "max n-gram length must be in [1, 4]");
  double score = 0.0;
  for (int n = 1; n <= max_n; ++n) {
    std::unordered_set<std::array<std::uint32_t, 4>, detail::NgramHash> distinct;
    std::size_t total = 0;
    for (const auto& doc : corpus.docs) {
      if (doc.size() < static_cast<std::size_t>(n)) continue;
      for (std::size_t i = 0; i + n <= doc.size(); ++i) {
        std::array<std::uint32_t, 4> g;
        g.fill(0xFFFFFFFFu);
        for (int k = 0; k < n; ++k) g[k] = doc[i + k];
        distinct.insert(g);
        ++total;
      }
    }
    if (total > 0) score += static_cast<double>(distinct.size()) / static_cast<double>(total);
  }
  return score;
}

inline double ngram_diversity(std::span<const std::string> docs, int max_n = 4) {
  return ngram_diversity(tokenize_corpus(docs), max_n);
}

/// All four metrics with per-metric wall time.
inline DiversityReport full_report(std::span<const std::string> docs, const PosTagger& tagger,
                                   const DiversityOptions& opts = {}) {
  if (docs.empty()) throw Error(ErrorCode::EmptyCorpus, "diversity report of an empty corpus");
  DiversityReport r;
  r.documents = docs.size();
  const auto corpus = tokenize_corpus(docs);
  r.word_count = corpus.token_count();

  auto t0 = std::chrono::steady_clock::now();
  r.cr = compression_ratio(docs);
  r.cr_seconds = detail::seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  r.cr_pos = pos_compression_ratio(docs, tagger);
  r.cr_pos_seconds = detail::seconds_since(t0);

  if (!opts.skip_hs) {
    t0 = std::chrono::steady_clock::now();
    r.hs = homogenization_rouge_l(corpus, opts.parallelism);
    r.hs_seconds = detail::seconds_since(t0);
  }

  t0 = std::chrono::steady_clock::now();
  r.nds = ngram_diversity(corpus, opts.max_ngram);
  r.nds_seconds = detail::seconds_since(t0);
  return r;
}

}  // namespace pdt
