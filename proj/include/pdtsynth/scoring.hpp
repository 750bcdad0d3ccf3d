#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pdtsynth/error.hpp"
#include "pdtsynth/prompts.hpp"
#include "pdtsynth/provider.hpp"
#include "pdtsynth/records.hpp"
#include "pdtsynth/reply_parse.hpp"
#include "pdtsynth/synth.hpp"
#include "pdtsynth/text.hpp"
#include "pdtsynth/worker_pool.hpp"

namespace pdt {

struct ScoringOptions {
  std::string model = "gpt-4o-mini";
  ScoringPrompt prompt = ScoringPrompt::Complete;
  double temperature = 0.0;
  int max_output_tokens = 512;
  int parse_retries = 3;
  int parallelism = 4;
  int stall_limit = 10;
};

/// Usage of the scoring calls themselves (not the generation telemetry).
struct ScoringUsage {
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  std::int64_t latency_ms = 0;
  int requests = 0;
};

namespace detail {

inline double clamp_unit(double v, std::string& explanation) {
  if (v >= 0.0 && v <= 1.0) return v;
  const double clamped = std::clamp(v, 0.0, 1.0);
  explanation += " [score clamped from " + text::format_double(v) + "]";
  return clamped;
}

}  // namespace detail

/// Scores one word/review pair with the chosen prompt. Unparseable replies are
/// resent up to `opts.parse_retries` times.
inline ScoredRecord score_record(const GenerationRecord& rec, ChatProvider& provider, const ScoringOptions& opts,
                                 ScoringUsage* usage = nullptr) {
  if (rec.review.empty())
    throw Error(ErrorCode::SchemaMismatch, "record " + std::to_string(rec.id) + ": cannot score an empty review");
  ChatRequest req;
  req.model = opts.model;
  req.system_prompt = std::string(prompts::scoring_instruction(opts.prompt));
  req.user_prompt = prompts::scoring_message(opts.prompt, rec.word, rec.review);
  req.temperature = opts.temperature;
  req.max_output_tokens = opts.max_output_tokens;
  req.request_id = rec.id;

  ScoringUsage local;
  for (int failures = 0;;) {
    const auto resp = provider.complete(req);
    local.prompt_tokens += resp.prompt_tokens;
    local.completion_tokens += resp.completion_tokens;
    local.latency_ms += resp.latency_ms;
    ++local.requests;
    auto parsed = parse_scoring_reply(resp.text, opts.prompt);
    if (!parsed) {
      if (++failures > opts.parse_retries)
        throw Error(ErrorCode::UnparseableCsvReply,
                    "record " + std::to_string(rec.id) + ": no " + std::string(to_string(opts.prompt)) +
                        " CSV line after " + std::to_string(local.requests) + " attempts");
      continue;
    }
    ScoredRecord out{rec, {}};
    auto& s = out.scoring;
    s.explanation = std::move(parsed->explanation);
    s.confidence = parsed->confidence;
    s.scoring_model = resp.model.empty() ? opts.model : resp.model;
    s.scoring_prompt = opts.prompt;
    if (opts.prompt == ScoringPrompt::BaseAdjust) {
      s.base_score = detail::clamp_unit(*parsed->base_score, s.explanation);
      s.adjusted_score = detail::clamp_unit(parsed->score, s.explanation);
      s.evaluated_score = *s.adjusted_score;
    } else {
      s.evaluated_score = detail::clamp_unit(parsed->score, s.explanation);
    }
    s.abs_diff = std::fabs(rec.target_score - s.evaluated_score);
    if (usage) {
      usage->prompt_tokens += local.prompt_tokens;
      usage->completion_tokens += local.completion_tokens;
      usage->latency_ms += local.latency_ms;
      usage->requests += local.requests;
    }
    return out;
  }
}

inline ScoredRecord score_complete(const GenerationRecord& rec, ChatProvider& provider,
                                   const std::string& model = "gpt-4o-mini") {
  ScoringOptions opts;
  opts.model = model;
  opts.prompt = ScoringPrompt::Complete;
  return score_record(rec, provider, opts);
}

inline ScoredRecord score_base_adjust(const GenerationRecord& rec, ChatProvider& provider,
                                      const std::string& model = "gpt-4o-mini") {
  ScoringOptions opts;
  opts.model = model;
  opts.prompt = ScoringPrompt::BaseAdjust;
  return score_record(rec, provider, opts);
}

struct ScoredBatch {
  std::vector<ScoredRecord> records;
  ScoringUsage usage;
  double wall_time_s = 0.0;
  bool logical_clock = false;
};

/// Scores every record; output order matches input order.
inline ScoredBatch score_dataset(std::span<const GenerationRecord> records, ChatProvider& provider,
                                 const ScoringOptions& opts) {
  ScoredBatch out;
  out.records.resize(records.size());
  std::vector<ScoringUsage> per(records.size());
  detail::StallGuard guard(opts.stall_limit);
  const auto start = std::chrono::steady_clock::now();
  const std::size_t workers = provider.order_sensitive() ? 1 : static_cast<std::size_t>(std::max(1, opts.parallelism));
  parallel_for(records.size(), workers, [&](std::size_t i) {
    for (;;) {
      try {
        ScoringUsage u;
        out.records[i] = score_record(records[i], provider, opts, &u);
        per[i] = u;
        guard.success();
        return;
      } catch (const Error& e) {
        if (!e.is_provider_failure()) throw;
        guard.failure(e);
      }
    }
  });
  for (const auto& u : per) {
    out.usage.prompt_tokens += u.prompt_tokens;
    out.usage.completion_tokens += u.completion_tokens;
    out.usage.latency_ms += u.latency_ms;
    out.usage.requests += u.requests;
  }
  out.logical_clock = provider.synthetic_timing();
  out.wall_time_s = out.logical_clock ? static_cast<double>(out.usage.latency_ms) / 1000.0 : detail::elapsed_s(start);
  return out;
}

struct FlaggedAdjustment {
  std::uint64_t id = 0;
  std::string word;
  double base_score = 0.0;
  double adjusted_score = 0.0;
  double magnitude = 0.0;
};

/// Base+Adjust records whose |adjusted - base| reaches `threshold`, largest
/// first (ties by id). The bound is inclusive; scores are two-decimal values,
/// so the comparison allows 1e-9 of floating-point slack.
template <class Range>
std::vector<FlaggedAdjustment> flag_large_adjustments(const Range& records, double threshold = 0.50) {
  std::vector<FlaggedAdjustment> out;
  for (const auto& r : records) {
    const GenerationRecord& gen = r.gen;
    const Scoring* s = nullptr;
    if constexpr (requires { r.scoring.has_value(); }) {
      if (r.scoring) s = &*r.scoring;
    } else {
      s = &r.scoring;
    }
    if (s == nullptr || s->scoring_prompt != ScoringPrompt::BaseAdjust || !s->base_score || !s->adjusted_score)
      throw Error(ErrorCode::WrongPromptKind,
                  "record " + std::to_string(gen.id) + " was not scored with the base-adjust prompt");
    const double magnitude = std::fabs(*s->adjusted_score - *s->base_score);
    if (magnitude >= threshold - 1e-9) out.push_back({gen.id, gen.word, *s->base_score, *s->adjusted_score, magnitude});
  }
  std::stable_sort(out.begin(), out.end(), [](const FlaggedAdjustment& a, const FlaggedAdjustment& b) {
    if (a.magnitude != b.magnitude) return a.magnitude > b.magnitude;
    return a.id < b.id;
  });
  return out;
}

}  // namespace pdt
