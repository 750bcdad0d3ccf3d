#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <utility>

#include <httplib.h>
#include <json.hpp>

#include "pdtsynth/error.hpp"
#include "pdtsynth/provider.hpp"

namespace pdt {

namespace detail {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;    // path prefix without trailing slash
};

inline SplitUrl split_base_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw Error(ErrorCode::ConfigError, "base_url needs a scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  SplitUrl out;
  out.origin = url.substr(0, path_start);
  out.path = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!out.path.empty() && out.path.back() == '/') out.path.pop_back();
  return out;
}

inline bool is_transient_status(int status) noexcept { return status == 429 || status == 408 || status >= 500; }

}  // namespace detail

/// Builds the `/chat/completions` request body.
inline nlohmann::json chat_request_body(const ChatRequest& req) {
  return {
      {"model", req.model},
      {"messages",
       nlohmann::json::array({{{"role", "system"}, {"content", req.system_prompt}},
                              {{"role", "user"}, {"content", req.user_prompt}}})},
      {"temperature", req.temperature},
      {"max_tokens", req.max_output_tokens},
  };
}

/// Extracts text and usage from a `/chat/completions` reply body.
inline ChatResponse parse_chat_reply(const std::string& body) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::MalformedProviderReply, std::string("reply is not JSON: ") + e.what());
  }
  ChatResponse resp;
  try {
    const auto& choices = j.at("choices");
    if (!choices.is_array() || choices.empty()) throw Error(ErrorCode::MalformedProviderReply, "reply has no choices");
    const auto& content = choices.at(0).at("message").at("content");
    if (!content.is_string()) throw Error(ErrorCode::MalformedProviderReply, "reply content is not text");
    resp.text = content.get<std::string>();
    const auto& usage = j.at("usage");
    resp.prompt_tokens = usage.at("prompt_tokens").get<std::int64_t>();
    resp.completion_tokens = usage.at("completion_tokens").get<std::int64_t>();
    if (resp.prompt_tokens < 0 || resp.completion_tokens < 0)
      throw Error(ErrorCode::MalformedProviderReply, "negative token usage");
    if (usage.contains("total_tokens") && usage["total_tokens"].is_number_integer() &&
        usage["total_tokens"].get<std::int64_t>() != resp.total_tokens())
      throw Error(ErrorCode::MalformedProviderReply, "usage.total_tokens disagrees with prompt + completion");
    resp.model = j.value("model", std::string{});
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedProviderReply, std::string("missing usage or text: ") + e.what());
  }
  return resp;
}

/// OpenAI-compatible `POST {base_url}/chat/completions` client with retry on
/// 429/5xx/timeouts and exponential backoff. The API key is read from the
/// configured environment variable on each call and never logged.
class OpenAiProvider final : public ChatProvider {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  explicit OpenAiProvider(ProviderConfig cfg, Sleeper sleeper = default_sleeper())
      : cfg_(std::move(cfg)), url_(detail::split_base_url(cfg_.base_url)), sleep_(std::move(sleeper)) {
    cfg_.validate();
  }

  ChatResponse complete(const ChatRequest& req) override {
    validate(req);
    const char* key = std::getenv(cfg_.api_key_env.c_str());
    if (key == nullptr || *key == '\0')
      throw Error(ErrorCode::AuthError, "environment variable " + cfg_.api_key_env + " is not set");

    const auto body = chat_request_body(req).dump();
    const auto path = url_.path + "/chat/completions";
    std::string last_failure;
    for (int attempt = 0;; ++attempt) {
      httplib::Client client(url_.origin);
      const auto timeout = std::chrono::duration<double>(cfg_.request_timeout_s);
      const auto secs = static_cast<time_t>(cfg_.request_timeout_s);
      const auto usecs = static_cast<time_t>((timeout.count() - static_cast<double>(secs)) * 1e6);
      client.set_connection_timeout(secs, usecs);
      client.set_read_timeout(secs, usecs);
      client.set_write_timeout(secs, usecs);
      client.set_bearer_token_auth(key);

      const auto start = std::chrono::steady_clock::now();
      auto result = client.Post(path, body, "application/json");
      const auto elapsed =
          std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);

      if (result) {
        const int status = result->status;
        if (status == 401 || status == 403)
          throw Error(ErrorCode::AuthError, "provider returned HTTP " + std::to_string(status));
        if (status >= 200 && status < 300) {
          auto resp = parse_chat_reply(result->body);
          resp.latency_ms = elapsed.count();
          resp.transport_retries = attempt;
          if (resp.model.empty()) resp.model = req.model;
          return resp;
        }
        if (!detail::is_transient_status(status))
          throw Error(ErrorCode::RequestRejected, "provider returned HTTP " + std::to_string(status));
        last_failure = "HTTP " + std::to_string(status);
      } else {
        last_failure = httplib::to_string(result.error());
      }

      if (attempt >= cfg_.max_retries)
        throw Error(ErrorCode::TransientExhausted,
                    "gave up after " + std::to_string(attempt + 1) + " attempts; last failure: " + last_failure);
      sleep_(backoff_delay(attempt));
    }
  }

  std::chrono::milliseconds backoff_delay(int attempt) const {
    const std::int64_t base = cfg_.backoff_initial_ms;
    const std::int64_t capped = std::min<std::int64_t>(base << std::min(attempt, 20), 30'000);
    return std::chrono::milliseconds(capped);
  }

  std::string describe() const override { return "openai:" + cfg_.base_url; }

  const ProviderConfig& config() const noexcept { return cfg_; }

  static Sleeper default_sleeper() {
    return [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }

 private:
  ProviderConfig cfg_;
  detail::SplitUrl url_;
  Sleeper sleep_;
};

}  // namespace pdt
