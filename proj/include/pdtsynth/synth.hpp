#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "pdtsynth/error.hpp"
#include "pdtsynth/prompts.hpp"
#include "pdtsynth/provider.hpp"
#include "pdtsynth/records.hpp"
#include "pdtsynth/reply_parse.hpp"
#include "pdtsynth/rng.hpp"
#include "pdtsynth/text.hpp"
#include "pdtsynth/wordlist.hpp"
#include "pdtsynth/worker_pool.hpp"

namespace pdt {

struct GenerationOptions {
  std::string model = "gpt-4o-mini";
  std::string product = "software product";
  double temperature = 1.0;
  int max_output_tokens = 1024;
  /// Resends after the model picks a word outside the list.
  int invalid_word_retries = 3;
  /// Resends after a reply that cannot be parsed at all.
  int parse_retries = 3;
  std::size_t offered_words = 10;
  int parallelism = 4;
  /// Consecutive provider failures tolerated before a batch is abandoned.
  int stall_limit = 10;
};

namespace detail {

struct Attempts {
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  std::int64_t latency_ms = 0;
  int requests = 0;

  void add(const ChatResponse& r) {
    prompt_tokens += r.prompt_tokens;
    completion_tokens += r.completion_tokens;
    latency_ms += r.latency_ms;
    ++requests;
  }
};

inline ChatRequest make_request(const GenerationOptions& opts, std::string system, std::string user,
                                std::uint64_t id) {
  ChatRequest req;
  req.model = opts.model;
  req.system_prompt = std::move(system);
  req.user_prompt = std::move(user);
  req.temperature = opts.temperature;
  req.max_output_tokens = opts.max_output_tokens;
  req.request_id = id;
  return req;
}

// Shared loop for the two methods where the model picks the word: resend the
// identical request on an unparseable reply or an out-of-list word.
inline GenerationRecord pick_word_loop(const WordList& list, ChatProvider& provider, const ChatRequest& req,
                                       const GenerationOptions& opts, GenerationRecord rec) {
  Attempts totals;
  int invalid = 0;
  int unparseable = 0;
  for (;;) {
    const auto resp = provider.complete(req);
    totals.add(resp);
    auto parsed = parse_generation_reply(resp.text, list, false);
    if (!parsed) {
      if (++unparseable > opts.parse_retries)
        throw Error(ErrorCode::UnparseableReply,
                    "record " + std::to_string(rec.id) + ": no word/review after " + std::to_string(totals.requests) +
                        " attempts");
      continue;
    }
    const auto choice = list.validate_choice(parsed->word);
    rec.review = std::move(parsed->review);
    if (choice.valid) {
      rec.word = choice.canonical->text;
      rec.word_valid = true;
      break;
    }
    rec.word = std::string(text::strip_quotes(parsed->word));
    rec.word_valid = false;
    if (++invalid > opts.invalid_word_retries) break;
  }
  rec.prompt_tokens = totals.prompt_tokens;
  rec.completion_tokens = totals.completion_tokens;
  rec.latency_ms = totals.latency_ms;
  rec.retries_used = totals.requests - 1;
  return rec;
}

inline void check_target(double target) {
  if (!(target >= 0.0 && target <= 1.0)) throw Error(ErrorCode::OutOfRange, "target score must be in [0, 1]");
}

}  // namespace detail

/// Word+Review: offer `opts.offered_words` sampled words and a target score;
/// the model picks a word and writes the review.
inline GenerationRecord gen_word_review(const WordList& list, double target, ChatProvider& provider, Rng& rng,
                                        const GenerationOptions& opts = {}, std::uint64_t id = 1) {
  detail::check_target(target);
  GenerationRecord rec;
  rec.id = id;
  rec.method = MethodKind::WordReview;
  rec.target_score = text::round_to(target, 2);
  const auto offered = list.sample(std::min(opts.offered_words, list.size()), rng);
  rec.offered_words.emplace();
  for (const auto& w : offered) rec.offered_words->push_back(w.text);
  auto req = detail::make_request(
      opts, prompts::with_format(prompts::word_review(opts.product, prompts::join_words(offered)), rec.method),
      prompts::target_message(rec.target_score), id);
  return detail::pick_word_loop(list, provider, req, opts, std::move(rec));
}

/// Review+Word: the model writes a review for the target score, then picks a
/// word from the full list.
inline GenerationRecord gen_review_word(const WordList& list, double target, ChatProvider& provider,
                                        const GenerationOptions& opts = {}, std::uint64_t id = 1) {
  detail::check_target(target);
  GenerationRecord rec;
  rec.id = id;
  rec.method = MethodKind::ReviewWord;
  rec.target_score = text::round_to(target, 2);
  auto req = detail::make_request(
      opts, prompts::with_format(prompts::review_word(opts.product, prompts::join_words(list.words())), rec.method),
      prompts::target_message(rec.target_score), id);
  return detail::pick_word_loop(list, provider, req, opts, std::move(rec));
}

/// Supply-Word: one uniformly drawn word is supplied; the model scores it and
/// writes a matching review. Its score becomes the target.
inline GenerationRecord gen_supply_word(const WordList& list, ChatProvider& provider, Rng& rng,
                                        const GenerationOptions& opts = {}, std::uint64_t id = 1) {
  const auto& word = list[static_cast<std::size_t>(rng.below(list.size()))];
  GenerationRecord rec;
  rec.id = id;
  rec.method = MethodKind::SupplyWord;
  rec.word = word.text;
  rec.word_valid = true;
  auto req = detail::make_request(
      opts, prompts::with_format(prompts::supply_word(opts.product, word.text), rec.method), word.text, id);

  detail::Attempts totals;
  for (int unparseable = 0;;) {
    const auto resp = provider.complete(req);
    totals.add(resp);
    auto parsed = parse_generation_reply(resp.text, list, true);
    if (parsed) {
      rec.target_score = text::round_to(*parsed->score, 2);
      rec.model_claimed_score = rec.target_score;
      rec.review = std::move(parsed->review);
      break;
    }
    if (++unparseable > opts.parse_retries)
      throw Error(ErrorCode::UnparseableReply,
                  "record " + std::to_string(id) + ": no score/review after " + std::to_string(totals.requests) +
                      " attempts");
  }
  rec.prompt_tokens = totals.prompt_tokens;
  rec.completion_tokens = totals.completion_tokens;
  rec.latency_ms = totals.latency_ms;
  rec.retries_used = totals.requests - 1;
  return rec;
}

/// Target score for Word+Review / Review+Word: uniform on [0, 1], 2 decimals.
inline double draw_target(Rng& rng) { return text::round_to(rng.uniform01(), 2); }

/// Generates one record; all randomness comes from the record's own stream.
inline GenerationRecord generate_one(MethodKind method, std::uint64_t seed, std::uint64_t id, const WordList& list,
                                     ChatProvider& provider, const GenerationOptions& opts) {
  auto rng = stream_for(seed, id);
  switch (method) {
    case MethodKind::WordReview: {
      const double target = draw_target(rng);
      return gen_word_review(list, target, provider, rng, opts, id);
    }
    case MethodKind::ReviewWord: {
      const double target = draw_target(rng);
      return gen_review_word(list, target, provider, opts, id);
    }
    case MethodKind::SupplyWord: return gen_supply_word(list, provider, rng, opts, id);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown method");
}

struct BatchStats {
  std::size_t rows = 0;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  std::int64_t requests = 0;
  std::int64_t failed_attempts = 0;
  /// Wall time; for providers with synthetic timing, the sum of reported latencies.
  double wall_time_s = 0.0;
  bool logical_clock = false;
};

struct Batch {
  std::vector<GenerationRecord> records;
  BatchStats stats;
};

namespace detail {

/// Tracks consecutive provider failures across workers.
class StallGuard {
 public:
  explicit StallGuard(int limit) : limit_(limit) {}

  void success() { consecutive_.store(0); }

  void failure(const Error& e) {
    failures_.fetch_add(1);
    if (consecutive_.fetch_add(1) + 1 >= limit_)
      throw Error(ErrorCode::PipelineStalled,
                  std::to_string(limit_) + " consecutive provider failures; last: " + std::string(e.what()));
  }

  std::int64_t failures() const { return failures_.load(); }

 private:
  int limit_;
  std::atomic<int> consecutive_{0};
  std::atomic<std::int64_t> failures_{0};
};

inline double elapsed_s(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace detail

/// Generates `n` records with ids 1..n. Records are returned in id order no
/// matter which worker finished first. Order-sensitive providers (scripted
/// replay) are driven from a single worker.
inline Batch run_batch(MethodKind method, std::size_t n, std::uint64_t seed, ChatProvider& provider,
                       const WordList& list, const GenerationOptions& opts = {}) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "count must be >= 1");
  if (opts.parallelism < 1) throw Error(ErrorCode::ConfigError, "parallelism must be >= 1");

  Batch batch;
  batch.records.resize(n);
  detail::StallGuard guard(opts.stall_limit);
  const auto start = std::chrono::steady_clock::now();
  const std::size_t workers = provider.order_sensitive() ? 1 : static_cast<std::size_t>(opts.parallelism);

  parallel_for(n, workers, [&](std::size_t i) {
    const std::uint64_t id = i + 1;
    for (;;) {
      try {
        batch.records[i] = generate_one(method, seed, id, list, provider, opts);
        guard.success();
        return;
      } catch (const Error& e) {
        if (!e.is_provider_failure()) throw;
        guard.failure(e);
      }
    }
  });

  auto& st = batch.stats;
  st.rows = n;
  st.failed_attempts = guard.failures();
  std::int64_t latency_ms = 0;
  for (const auto& r : batch.records) {
    st.prompt_tokens += r.prompt_tokens;
    st.completion_tokens += r.completion_tokens;
    st.requests += r.retries_used + 1;
    latency_ms += r.latency_ms;
  }
  st.logical_clock = provider.synthetic_timing();
  st.wall_time_s = st.logical_clock ? static_cast<double>(latency_ms) / 1000.0 : detail::elapsed_s(start);
  return batch;
}

}  // namespace pdt
