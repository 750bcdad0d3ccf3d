#pragma once

#include <cstdint>
#include <string>

#include "pdtsynth/error.hpp"

namespace pdt {

struct ChatRequest {
  std::string model = "gpt-4o-mini";
  std::string system_prompt;
  std::string user_prompt;
  double temperature = 1.0;
  int max_output_tokens = 1024;
  /// Caller-assigned id used to reassociate out-of-order completions.
  std::uint64_t request_id = 0;
};

struct ChatResponse {
  std::string text;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  std::int64_t latency_ms = 0;
  std::string model;
  /// HTTP-level resends (429/5xx/timeouts) spent on this call.
  int transport_retries = 0;

  std::int64_t total_tokens() const noexcept { return prompt_tokens + completion_tokens; }
};

struct ProviderConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string api_key_env = "OPENAI_API_KEY";
  double request_timeout_s = 120.0;
  int max_retries = 5;
  int parallelism = 4;
  /// First backoff delay; doubles per retry, capped at 30 s.
  int backoff_initial_ms = 500;

  void validate() const {
    if (base_url.empty()) throw Error(ErrorCode::ConfigError, "provider base_url is empty");
    if (api_key_env.empty()) throw Error(ErrorCode::ConfigError, "provider api_key_env is empty");
    if (!(request_timeout_s > 0)) throw Error(ErrorCode::ConfigError, "request_timeout_s must be positive");
    if (max_retries < 0 || max_retries > 10) throw Error(ErrorCode::ConfigError, "max_retries must be in [0, 10]");
    if (parallelism < 1) throw Error(ErrorCode::ConfigError, "parallelism must be >= 1");
    if (backoff_initial_ms < 0) throw Error(ErrorCode::ConfigError, "backoff_initial_ms must be >= 0");
  }
};

inline void validate(const ChatRequest& req) {
  if (req.system_prompt.empty() || req.user_prompt.empty())
    throw Error(ErrorCode::InvalidArgument, "chat prompts must be non-empty");
  if (!(req.temperature >= 0.0 && req.temperature <= 2.0))
    throw Error(ErrorCode::InvalidArgument, "temperature must be in [0, 2]");
  if (req.max_output_tokens <= 0) throw Error(ErrorCode::InvalidArgument, "max_output_tokens must be positive");
}

/// A chat-completion backend. Implementations must be safe to call from
/// several threads at once.
class ChatProvider {
 public:
  virtual ~ChatProvider() = default;

  virtual ChatResponse complete(const ChatRequest& req) = 0;

  /// True when replies depend on call order (scripted replay). Batch drivers
  /// then issue requests one at a time so output never depends on scheduling.
  virtual bool order_sensitive() const noexcept { return false; }

  /// True when reported latencies are synthetic; run timing then uses a
  /// logical clock so manifests are reproducible.
  virtual bool synthetic_timing() const noexcept { return false; }

  virtual std::string describe() const = 0;
};

}  // namespace pdt
