#pragma once

#include <cstdint>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pdtsynth/error.hpp"
#include "pdtsynth/provider.hpp"
#include "pdtsynth/text.hpp"

namespace pdt {

/// One line of a mock script.
///
///   {"match": "0.75", "text": "...", "prompt_tokens": 120, "completion_tokens": 80}
///
/// Optional keys: `latency_ms` (default 0), `model`, and `error` with one of
/// "transient", "auth", "malformed" to simulate a provider failure.
struct ScriptLine {
  std::optional<std::string> match;
  std::string text;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  std::int64_t latency_ms = 0;
  std::optional<std::string> model;
  std::optional<std::string> error;
};

inline ScriptLine script_line_from_json(const nlohmann::json& j, const std::string& where) {
  if (!j.is_object()) throw Error(ErrorCode::MalformedLine, where + ": script line must be a JSON object");
  ScriptLine line;
  try {
    if (j.contains("match") && !j["match"].is_null()) line.match = j["match"].get<std::string>();
    if (j.contains("error") && !j["error"].is_null()) line.error = j["error"].get<std::string>();
    if (!line.error) {
      if (!j.contains("text")) throw Error(ErrorCode::MalformedLine, where + ": missing 'text'");
      line.text = j["text"].get<std::string>();
    }
    line.prompt_tokens = j.value("prompt_tokens", std::int64_t{0});
    line.completion_tokens = j.value("completion_tokens", std::int64_t{0});
    line.latency_ms = j.value("latency_ms", std::int64_t{0});
    if (j.contains("model")) line.model = j["model"].get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedLine, where + ": " + e.what());
  }
  if (line.prompt_tokens < 0 || line.completion_tokens < 0 || line.latency_ms < 0)
    throw Error(ErrorCode::MalformedLine, where + ": negative token count or latency");
  return line;
}

inline nlohmann::json to_json(const ScriptLine& line) {
  nlohmann::json j;
  if (line.match) j["match"] = *line.match;
  if (line.error) j["error"] = *line.error;
  j["text"] = line.text;
  j["prompt_tokens"] = line.prompt_tokens;
  j["completion_tokens"] = line.completion_tokens;
  if (line.latency_ms) j["latency_ms"] = line.latency_ms;
  if (line.model) j["model"] = *line.model;
  return j;
}

inline std::vector<ScriptLine> load_script(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open mock script '" + path + "'");
  std::vector<ScriptLine> lines;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    auto trimmed = text::trim(raw);
    if (trimmed.empty()) continue;
    const auto where = path + ":" + std::to_string(line_no);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(trimmed);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::MalformedLine, where + ": " + e.what());
    }
    lines.push_back(script_line_from_json(j, where));
  }
  return lines;
}

/// Offline provider that replays a JSON-lines script. A request consumes the
/// first unconsumed line whose `match` is a substring of the user prompt, or
/// which has no `match`.
class ScriptedProvider final : public ChatProvider {
 public:
  explicit ScriptedProvider(std::vector<ScriptLine> lines, std::string source = "inline")
      : lines_(std::move(lines)), consumed_(lines_.size(), false), source_(std::move(source)) {}

  ChatResponse complete(const ChatRequest& req) override {
    validate(req);
    std::lock_guard lock(mu_);
    log_.push_back(req);
    for (std::size_t i = 0; i < lines_.size(); ++i) {
      if (consumed_[i]) continue;
      const auto& line = lines_[i];
      if (line.match && req.user_prompt.find(*line.match) == std::string::npos) continue;
      consumed_[i] = true;
      if (line.error) raise(*line.error, i);
      ChatResponse resp;
      resp.text = line.text;
      resp.prompt_tokens = line.prompt_tokens;
      resp.completion_tokens = line.completion_tokens;
      resp.latency_ms = line.latency_ms;
      resp.model = line.model.value_or(req.model);
      return resp;
    }
    throw Error(ErrorCode::ScriptExhausted,
                source_ + ": no unconsumed line for request " + std::to_string(req.request_id));
  }

  bool order_sensitive() const noexcept override { return true; }
  bool synthetic_timing() const noexcept override { return true; }
  std::string describe() const override { return "mock:" + source_; }

  /// Every request received, in arrival order.
  std::vector<ChatRequest> requests() const {
    std::lock_guard lock(mu_);
    return log_;
  }

  std::size_t remaining() const {
    std::lock_guard lock(mu_);
    std::size_t n = 0;
    for (bool c : consumed_) n += c ? 0 : 1;
    return n;
  }

 private:
  [[noreturn]] void raise(const std::string& kind, std::size_t index) const {
    const auto where = source_ + " line " + std::to_string(index + 1);
    if (kind == "auth") throw Error(ErrorCode::AuthError, where + ": scripted 401");
    if (kind == "malformed") throw Error(ErrorCode::MalformedProviderReply, where + ": scripted malformed reply");
    throw Error(ErrorCode::TransientExhausted, where + ": scripted transient failure");
  }

  std::vector<ScriptLine> lines_;
  std::vector<bool> consumed_;
  std::vector<ChatRequest> log_;
  std::string source_;
  mutable std::mutex mu_;
};

inline std::unique_ptr<ScriptedProvider> mock_from_script(const std::string& path) {
  return std::make_unique<ScriptedProvider>(load_script(path), path);
}

}  // namespace pdt
