#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "pdtsynth/costing.hpp"
#include "pdtsynth/datastore.hpp"
#include "pdtsynth/error.hpp"
#include "pdtsynth/provider.hpp"
#include "pdtsynth/records.hpp"

namespace pdt {

/// Everything a pipeline stage needs. Serialized as a JSON object whose keys
/// mirror the CLI flags; absent keys keep their defaults.
struct RunConfig {
  ProviderConfig provider;
  std::string model = "gpt-4o-mini";
  MethodKind method = MethodKind::WordReview;
  std::size_t count = 1000;
  std::uint64_t seed = 42;
  std::string product = "software product";
  std::string words = "builtin";
  ScoringPrompt scoring_prompt = ScoringPrompt::Complete;
  std::string scoring_model = "gpt-4o-mini";
  PriceSheet prices = price_presets::gpt_4o_mini();
  std::string output;  // dataset path for generate/score, directory for assess
  DatasetFormat format = DatasetFormat::Csv;
  std::string mock;    // script path; empty means live
  bool skip_hs = false;
  std::size_t target_rows = 1'000'000;
  std::optional<PriceSheet> alt_prices = price_presets::gpt_4o();

  void validate() const {
    provider.validate();
    prices.validate();
    if (alt_prices) alt_prices->validate();
    if (count == 0) throw Error(ErrorCode::ConfigError, "count must be >= 1");
    if (model.empty() || scoring_model.empty()) throw Error(ErrorCode::ConfigError, "model names must be non-empty");
    if (product.empty()) throw Error(ErrorCode::ConfigError, "product must be non-empty");
  }
};

namespace detail {

inline PriceSheet price_sheet_from_json(const nlohmann::json& j, const char* key) {
  if (j.is_string()) {
    auto p = price_presets::by_name(j.get<std::string>());
    if (!p) throw Error(ErrorCode::ConfigError, std::string(key) + ": unknown price preset '" + j.get<std::string>() + "'");
    return *p;
  }
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, std::string(key) + " must be a preset name or an object");
  PriceSheet p;
  p.model = j.value("model", std::string("custom"));
  p.input_per_million = j.at("input_per_million").get<double>();
  p.output_per_million = j.at("output_per_million").get<double>();
  return p;
}

inline nlohmann::ordered_json price_sheet_to_json(const PriceSheet& p) {
  return {{"model", p.model}, {"input_per_million", p.input_per_million}, {"output_per_million", p.output_per_million}};
}

}  // namespace detail

inline nlohmann::ordered_json to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["provider"] = {{"base_url", c.provider.base_url},
                   {"api_key_env", c.provider.api_key_env},
                   {"request_timeout_s", c.provider.request_timeout_s},
                   {"max_retries", c.provider.max_retries},
                   {"backoff_initial_ms", c.provider.backoff_initial_ms}};
  j["parallelism"] = c.provider.parallelism;
  j["model"] = c.model;
  j["method"] = to_string(c.method);
  j["count"] = c.count;
  j["seed"] = c.seed;
  j["product"] = c.product;
  j["words"] = c.words;
  j["scoring_prompt"] = to_string(c.scoring_prompt);
  j["scoring_model"] = c.scoring_model;
  j["prices"] = detail::price_sheet_to_json(c.prices);
  j["alt_prices"] = c.alt_prices ? detail::price_sheet_to_json(*c.alt_prices) : nlohmann::ordered_json(nullptr);
  j["output"] = c.output;
  j["format"] = to_string(c.format);
  j["mock"] = c.mock;
  j["skip_hs"] = c.skip_hs;
  j["target_rows"] = c.target_rows;
  return j;
}

/// Applies the keys present in `j` on top of `base`.
inline RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {}) {
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, "config must be a JSON object");
  RunConfig c = std::move(base);
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const auto& k = it.key();
      const auto& v = it.value();
      if (k == "api_key")
        throw Error(ErrorCode::ConfigError, "API keys are read from the environment only; remove api_key");
      if (k == "provider") {
        c.provider.base_url = v.value("base_url", c.provider.base_url);
        c.provider.api_key_env = v.value("api_key_env", c.provider.api_key_env);
        c.provider.request_timeout_s = v.value("request_timeout_s", c.provider.request_timeout_s);
        c.provider.max_retries = v.value("max_retries", c.provider.max_retries);
        c.provider.backoff_initial_ms = v.value("backoff_initial_ms", c.provider.backoff_initial_ms);
        if (v.contains("api_key"))
          throw Error(ErrorCode::ConfigError, "API keys are read from the environment only; remove provider.api_key");
      } else if (k == "parallelism") {
        c.provider.parallelism = v.get<int>();
      } else if (k == "model") {
        c.model = v.get<std::string>();
      } else if (k == "method") {
        auto m = parse_method(v.get<std::string>());
        if (!m) throw Error(ErrorCode::ConfigError, "unknown method '" + v.get<std::string>() + "'");
        c.method = *m;
      } else if (k == "count") {
        c.count = v.get<std::size_t>();
      } else if (k == "seed") {
        c.seed = v.get<std::uint64_t>();
      } else if (k == "product") {
        c.product = v.get<std::string>();
      } else if (k == "words") {
        c.words = v.get<std::string>();
      } else if (k == "scoring_prompt") {
        auto p = parse_scoring_prompt(v.get<std::string>());
        if (!p) throw Error(ErrorCode::ConfigError, "unknown scoring prompt '" + v.get<std::string>() + "'");
        c.scoring_prompt = *p;
      } else if (k == "scoring_model") {
        c.scoring_model = v.get<std::string>();
      } else if (k == "prices") {
        c.prices = detail::price_sheet_from_json(v, "prices");
      } else if (k == "alt_prices") {
        if (v.is_null())
          c.alt_prices.reset();
        else
          c.alt_prices = detail::price_sheet_from_json(v, "alt_prices");
      } else if (k == "output") {
        c.output = v.get<std::string>();
      } else if (k == "format") {
        auto f = parse_format(v.get<std::string>());
        if (!f) throw Error(ErrorCode::ConfigError, "unknown format '" + v.get<std::string>() + "'");
        c.format = *f;
      } else if (k == "mock") {
        c.mock = v.get<std::string>();
      } else if (k == "skip_hs") {
        c.skip_hs = v.get<bool>();
      } else if (k == "target_rows") {
        c.target_rows = v.get<std::size_t>();
      } else {
        throw Error(ErrorCode::ConfigError, "unknown config key '" + k + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("config: ") + e.what());
  }
  return c;
}

inline RunConfig load_config(const std::filesystem::path& path, RunConfig base = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config '" + path.string() + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in, nullptr, true, true);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
  }
  return config_from_json(j, std::move(base));
}

}  // namespace pdt
