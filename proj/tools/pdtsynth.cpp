// pdtsynth: generate | score | assess | project-cost

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pdtsynth/pdtsynth.hpp"

namespace {

struct Overrides {
  std::string config;
  std::string method;
  std::size_t count = 0;
  std::uint64_t seed = 0;
  std::string product;
  std::string model;
  std::string words;
  std::string mock;
  std::string output;
  std::string format;
  int parallelism = 0;
  std::string scoring_model;
  std::string scoring_prompt;
  std::string base_url;
  std::string prices;
  std::string alt_prices;
  std::size_t target_rows = 0;
  bool skip_hs = false;
};

// Flags given on the command line win over the config file.
pdt::RunConfig resolve(const CLI::App& sub, const Overrides& o) {
  pdt::RunConfig cfg;
  if (!o.config.empty()) cfg = pdt::load_config(o.config);
  auto given = [&](const char* name) {
    const auto* opt = sub.get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  };
  if (given("--method")) {
    auto m = pdt::parse_method(o.method);
    if (!m) throw pdt::Error(pdt::ErrorCode::ConfigError, "unknown method '" + o.method + "'");
    cfg.method = *m;
  }
  if (given("--count")) cfg.count = o.count;
  if (given("--seed")) cfg.seed = o.seed;
  if (given("--product")) cfg.product = o.product;
  if (given("--model")) cfg.model = o.model;
  if (given("--words")) cfg.words = o.words;
  if (given("--mock")) cfg.mock = o.mock;
  if (given("--output")) cfg.output = o.output;
  if (given("--format")) {
    auto f = pdt::parse_format(o.format);
    if (!f) throw pdt::Error(pdt::ErrorCode::ConfigError, "unknown format '" + o.format + "'");
    cfg.format = *f;
  } else if (given("--output")) {
    cfg.format = pdt::format_for_path(cfg.output);
  }
  if (given("--parallelism")) cfg.provider.parallelism = o.parallelism;
  if (given("--scoring-model")) cfg.scoring_model = o.scoring_model;
  if (given("--scoring-prompt")) {
    auto p = pdt::parse_scoring_prompt(o.scoring_prompt);
    if (!p) throw pdt::Error(pdt::ErrorCode::ConfigError, "unknown scoring prompt '" + o.scoring_prompt + "'");
    cfg.scoring_prompt = *p;
  }
  if (given("--base-url")) cfg.provider.base_url = o.base_url;
  auto preset = [](const std::string& name) {
    auto p = pdt::price_presets::by_name(name);
    if (!p) throw pdt::Error(pdt::ErrorCode::ConfigError, "unknown price preset '" + name + "'");
    return *p;
  };
  if (given("--prices")) cfg.prices = preset(o.prices);
  if (given("--alt-prices")) {
    if (o.alt_prices == "none")
      cfg.alt_prices.reset();
    else
      cfg.alt_prices = preset(o.alt_prices);
  }
  if (given("--target-rows")) cfg.target_rows = o.target_rows;
  if (given("--skip-hs")) cfg.skip_hs = o.skip_hs;
  return cfg;
}

int exit_code_for(pdt::ErrorCode c) {
  switch (c) {
    case pdt::ErrorCode::ConfigError:
    case pdt::ErrorCode::InvalidArgument: return 2;
    case pdt::ErrorCode::AuthError: return 3;
    case pdt::ErrorCode::IoError: return 4;
    case pdt::ErrorCode::SchemaMismatch: return 5;
    default: return 1;
  }
}

void report_error(std::string_view code, std::string_view message) {
  nlohmann::ordered_json j;
  j["error"] = code;
  j["message"] = message;
  std::cerr << j.dump() << '\n';
}

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config, "JSON config file; flags override its values")->check(CLI::ExistingFile);
  sub->add_option("--words", o.words, "word list file, or 'builtin'");
  sub->add_option("--parallelism", o.parallelism, "worker threads for provider calls and HS")->check(CLI::PositiveNumber);
}

void add_provider(CLI::App* sub, Overrides& o) {
  sub->add_option("--mock", o.mock, "replay a JSONL mock script instead of calling the API")->check(CLI::ExistingFile);
  sub->add_option("--base-url", o.base_url, "chat-completions base URL");
  sub->add_option("--prices", o.prices, "price preset recorded in the manifest (gpt-4o-mini, gpt-4o)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthesize and assess Product Desirability Toolkit review datasets"};
  app.set_version_flag("--version", std::string(pdt::kToolVersion));
  app.require_subcommand(1);
  Overrides o;

  auto* gen = app.add_subcommand("generate", "generate a dataset with one method");
  add_common(gen, o);
  add_provider(gen, o);
  gen->add_option("--method", o.method, "word-review | review-word | supply-word");
  gen->add_option("--count", o.count, "rows to generate")->check(CLI::PositiveNumber);
  gen->add_option("--seed", o.seed, "seed for targets and word sampling");
  gen->add_option("--product", o.product, "product description used in the prompts");
  gen->add_option("--model", o.model, "generation model");
  gen->add_option("-o,--output", o.output, "dataset path (.csv or .jsonl)");
  gen->add_option("--format", o.format, "csv | jsonl (default: from the output extension)");

  std::string score_input;
  auto* score = app.add_subcommand("score", "score a generated dataset");
  add_common(score, o);
  add_provider(score, o);
  score->add_option("input", score_input, "dataset to score")->required()->check(CLI::ExistingFile);
  score->add_option("--scoring-model", o.scoring_model, "model used for scoring");
  score->add_option("--scoring-prompt", o.scoring_prompt, "complete | base-adjust");
  score->add_option("-o,--output", o.output, "scored dataset path (default: <input>.scored.<ext>)");
  score->add_option("--format", o.format, "csv | jsonl");

  std::vector<std::string> assess_inputs;
  std::string assess_dir;
  std::size_t top_k = 5;
  bool assess_json = false;
  auto* assess = app.add_subcommand("assess", "alignment, diversity, word-usage and cost reports");
  add_common(assess, o);
  assess->add_option("inputs", assess_inputs, "one or more datasets")->required()->check(CLI::ExistingFile);
  assess->add_option("-o,--output-dir", assess_dir, "directory for report files");
  assess->add_flag("--skip-hs", o.skip_hs, "skip the homogenization score");
  assess->add_option("--top-k", top_k, "most frequent words to list")->check(CLI::PositiveNumber);
  assess->add_option("--prices", o.prices, "price preset for the cost table");
  assess->add_flag("--json", assess_json, "print the JSON report instead of tables");

  std::string cost_dataset;
  pdt::ProjectCostInput cost_in;
  auto* cost = app.add_subcommand("project-cost", "extrapolate a run's cost and time");
  cost->add_option("--config", o.config, "JSON config file")->check(CLI::ExistingFile);
  cost->add_option("--dataset", cost_dataset, "dataset whose usage is projected")->check(CLI::ExistingFile);
  cost->add_option("--rows", cost_in.rows, "rows in the measured run (without --dataset)");
  cost->add_option("--time-s", cost_in.wall_time_s, "wall time of the measured run in seconds");
  cost->add_option("--input-tokens", cost_in.input_tokens, "input tokens of the measured run");
  cost->add_option("--output-tokens", cost_in.output_tokens, "output tokens of the measured run");
  cost->add_option("--target-rows", o.target_rows, "rows to project to (default 1000000)");
  cost->add_option("--prices", o.prices, "price preset (gpt-4o-mini, gpt-4o)");
  cost->add_option("--alt-prices", o.alt_prices, "second preset to re-price with, or 'none'");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    report_error("UsageError", e.what());
    return 2;
  }

  try {
    if (gen->parsed()) {
      auto cfg = resolve(*gen, o);
      if (cfg.output.empty()) cfg.output = std::string(pdt::to_string(cfg.method)) + ".csv";
      const auto res = pdt::cmd_generate(cfg);
      nlohmann::ordered_json j{{"dataset", res.dataset.string()},
                               {"manifest", pdt::manifest_path_for(res.dataset).string()},
                               {"run_id", res.manifest.run_id},
                               {"rows", res.manifest.rows},
                               {"prompt_tokens", res.manifest.prompt_tokens},
                               {"completion_tokens", res.manifest.completion_tokens},
                               {"wall_time_s", res.manifest.wall_time_s}};
      std::cout << j.dump() << '\n';
    } else if (score->parsed()) {
      auto cfg = resolve(*score, o);
      if (score->get_option("--output")->count() == 0) cfg.output.clear();
      const auto res = pdt::cmd_score(cfg, score_input);
      nlohmann::ordered_json j{{"dataset", res.dataset.string()},
                               {"manifest", pdt::manifest_path_for(res.dataset).string()},
                               {"run_id", res.manifest.run_id},
                               {"rows", res.manifest.rows},
                               {"scoring_model", res.manifest.scoring_model},
                               {"scoring_prompt", res.manifest.scoring_prompt}};
      std::cout << j.dump() << '\n';
    } else if (assess->parsed()) {
      const auto cfg = resolve(*assess, o);
      pdt::AssessOptions aopts;
      aopts.output_dir = assess_dir;
      aopts.skip_hs = cfg.skip_hs;
      aopts.parallelism = static_cast<std::size_t>(cfg.provider.parallelism);
      aopts.top_k = top_k;
      aopts.words = cfg.words;
      aopts.prices = cfg.prices;
      std::vector<std::filesystem::path> paths(assess_inputs.begin(), assess_inputs.end());
      const auto res = pdt::cmd_assess(paths, aopts);
      if (assess_json)
        std::cout << res.json.dump(2) << '\n';
      else
        std::cout << res.text;
    } else if (cost->parsed()) {
      const auto cfg = resolve(*cost, o);
      if (!cost_dataset.empty()) cost_in.dataset = cost_dataset;
      else if (cost_in.rows == 0)
        throw pdt::Error(pdt::ErrorCode::InvalidArgument, "give --dataset or --rows with token counts");
      const auto res = pdt::cmd_project_cost(cfg, cost_in);
      std::cout << res.json.dump(2) << '\n';
    }
  } catch (const pdt::Error& e) {
    report_error(pdt::to_string(e.code()), e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    report_error("InternalError", e.what());
    return 1;
  }
  return 0;
}
