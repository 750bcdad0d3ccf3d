#pragma once

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pdtsynth/alignment.hpp"
#include "pdtsynth/config.hpp"
#include "pdtsynth/costing.hpp"
#include "pdtsynth/datastore.hpp"
#include "pdtsynth/diversity.hpp"
#include "pdtsynth/openai_provider.hpp"
#include "pdtsynth/pos_tagger.hpp"
#include "pdtsynth/prompts.hpp"
#include "pdtsynth/scoring.hpp"
#include "pdtsynth/scripted_provider.hpp"
#include "pdtsynth/synth.hpp"
#include "pdtsynth/wordlist.hpp"

#ifndef PDTSYNTH_VERSION
#define PDTSYNTH_VERSION "0.0.0"
#endif

namespace pdt {

inline constexpr std::string_view kToolVersion = PDTSYNTH_VERSION;

inline std::unique_ptr<ChatProvider> make_provider(const RunConfig& cfg) {
  if (!cfg.mock.empty()) return mock_from_script(cfg.mock);
  return std::make_unique<OpenAiProvider>(cfg.provider);
}

namespace detail {

inline void stamp_times(RunManifest& m, bool logical, std::time_t started, double wall_time_s) {
  m.clock = logical ? "logical" : "wall";
  m.wall_time_s = wall_time_s;
  if (logical) {
    m.started_at = iso_utc(0);
    m.finished_at = iso_utc(static_cast<std::time_t>(std::llround(wall_time_s)));
  } else {
    m.started_at = iso_utc(started);
    m.finished_at = iso_utc(std::time(nullptr));
  }
}

// Only the output file name counts, so replaying into another directory keeps the id.
inline std::string run_key(RunConfig cfg, std::string_view stage, std::string_view extra) {
  cfg.output = std::filesystem::path(cfg.output).filename().string();
  std::ostringstream os;
  os << stage << '|' << to_json(cfg).dump() << '|' << extra;
  return os.str();
}

inline std::filesystem::path default_scored_path(const std::filesystem::path& in) {
  auto out = in;
  out.replace_filename(in.stem().string() + ".scored" + in.extension().string());
  return out;
}

}  // namespace detail

struct StageResult {
  std::filesystem::path dataset;
  RunManifest manifest;
};

/// Generates `cfg.count` records and writes the dataset plus a fresh manifest sidecar.
inline StageResult cmd_generate(const RunConfig& cfg, ChatProvider* provider = nullptr) {
  cfg.validate();
  if (cfg.output.empty()) throw Error(ErrorCode::ConfigError, "generate needs an output path");
  const auto list = WordList::load(cfg.words);
  std::unique_ptr<ChatProvider> owned;
  if (!provider) {
    owned = make_provider(cfg);
    provider = owned.get();
  }

  GenerationOptions opts;
  opts.model = cfg.model;
  opts.product = cfg.product;
  opts.parallelism = cfg.provider.parallelism;
  const auto started = std::time(nullptr);
  const auto batch = run_batch(cfg.method, cfg.count, cfg.seed, *provider, list, opts);

  Dataset data(batch.records.begin(), batch.records.end());
  StageResult res;
  res.dataset = cfg.output;
  write_dataset(data, res.dataset, cfg.format);

  auto& m = res.manifest;
  m.run_id = batch.stats.logical_clock ? derived_run_id(detail::run_key(cfg, "generate", provider->describe()))
                                       : random_run_id();
  m.stage = "generate";
  m.method = std::string(to_string(cfg.method));
  m.model = cfg.model;
  m.system_prompt_template = prompts::template_for(cfg.method);
  m.format_suffix = std::string(prompts::format_suffix(cfg.method));
  m.user_prompt_template = prompts::user_template_for(cfg.method);
  m.prompt_version = std::string(prompts::kVersion);
  m.seed = cfg.seed;
  m.product = cfg.product;
  m.word_list = list.source();
  m.rows = data.size();
  detail::stamp_times(m, batch.stats.logical_clock, started, batch.stats.wall_time_s);
  m.prompt_tokens = batch.stats.prompt_tokens;
  m.completion_tokens = batch.stats.completion_tokens;
  m.requests = batch.stats.requests;
  m.price_model = cfg.prices.model;
  m.price_input_per_million = cfg.prices.input_per_million;
  m.price_output_per_million = cfg.prices.output_per_million;
  m.provider = provider->describe();
  m.tool_version = std::string(kToolVersion);
  m.dataset = res.dataset.filename().string();
  write_manifest_chain(res.dataset, {}, m);
  return res;
}

/// Scores every row of `input` and writes a scored copy; the input's manifest
/// lineage is carried over and this run appended.
inline StageResult cmd_score(const RunConfig& cfg, const std::filesystem::path& input,
                             ChatProvider* provider = nullptr) {
  cfg.validate();
  const auto list = WordList::load(cfg.words);
  ReadOptions ropts;
  ropts.word_list = &list;
  const auto data = read_dataset(input, ropts);
  const auto gens = generation_records(data);
  std::unique_ptr<ChatProvider> owned;
  if (!provider) {
    owned = make_provider(cfg);
    provider = owned.get();
  }

  ScoringOptions sopts;
  sopts.model = cfg.scoring_model;
  sopts.prompt = cfg.scoring_prompt;
  sopts.parallelism = cfg.provider.parallelism;
  const auto started = std::time(nullptr);
  const auto scored = score_dataset(gens, *provider, sopts);

  Dataset out(scored.records.begin(), scored.records.end());
  StageResult res;
  res.dataset = cfg.output.empty() ? detail::default_scored_path(input) : std::filesystem::path(cfg.output);
  write_dataset(out, res.dataset, cfg.output.empty() ? std::nullopt : std::optional(cfg.format));

  const auto lineage = read_manifests(input);
  auto& m = res.manifest;
  m.run_id = scored.logical_clock
                 ? derived_run_id(detail::run_key(cfg, "score", input.filename().string() + "|" + provider->describe()))
                 : random_run_id();
  m.stage = "score";
  m.method = gens.empty() ? std::string() : std::string(to_string(gens.front().method));
  if (!lineage.empty()) {
    m.model = lineage.front().model;
    m.seed = lineage.front().seed;
    m.product = lineage.front().product;
  }
  m.scoring_model = cfg.scoring_model;
  m.scoring_prompt = std::string(to_string(cfg.scoring_prompt));
  m.scoring_instruction = std::string(prompts::scoring_instruction(cfg.scoring_prompt));
  m.prompt_version = std::string(prompts::kVersion);
  m.word_list = list.source();
  m.rows = out.size();
  detail::stamp_times(m, scored.logical_clock, started, scored.wall_time_s);
  m.prompt_tokens = scored.usage.prompt_tokens;
  m.completion_tokens = scored.usage.completion_tokens;
  m.requests = scored.usage.requests;
  m.price_model = cfg.prices.model;
  m.price_input_per_million = cfg.prices.input_per_million;
  m.price_output_per_million = cfg.prices.output_per_million;
  m.provider = provider->describe();
  m.tool_version = std::string(kToolVersion);
  m.dataset = res.dataset.filename().string();
  write_manifest_chain(res.dataset, lineage, m);
  return res;
}

// ------------------------------------------------------------------ reports

namespace report {

using nlohmann::ordered_json;

inline ordered_json opt_or_undefined(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json("undefined");
}

inline std::string opt_text(const std::optional<double>& v, int decimals) {
  return v ? text::format_fixed(*v, decimals) : std::string("undefined");
}

inline ordered_json histogram_json(const std::vector<HistogramBin>& bins) {
  ordered_json a = ordered_json::array();
  for (const auto& b : bins) a.push_back({{"bin", b.label}, {"count", b.count}, {"percentage", b.percent}});
  return a;
}

/// Plot-ready `bin,percentage` rows.
inline std::string histogram_csv(const std::vector<HistogramBin>& bins) {
  std::string out = "bin,percentage\n";
  for (const auto& b : bins) out += csv::format_row({b.label, text::format_fixed(b.percent, 4)});
  return out;
}

inline ordered_json to_json(const AlignmentReport& r) {
  ordered_json j;
  j["n"] = r.n;
  j["mean_target"] = r.mean_target;
  j["mean_evaluated"] = r.mean_evaluated;
  j["var_target"] = opt_or_undefined(r.var_target);
  j["var_evaluated"] = opt_or_undefined(r.var_evaluated);
  j["mad"] = r.mad;
  j["msd"] = r.msd;
  j["pearson"] = opt_or_undefined(r.pearson);
  j["t_stat"] = opt_or_undefined(r.t_stat);
  j["diff_histogram"] = histogram_json(r.diff_histogram);
  j["score_histogram"] = histogram_json(r.score_histogram);
  return j;
}

inline ordered_json to_json(const WordUsageReport& r) {
  auto pairs = [](const std::vector<std::pair<std::string, std::size_t>>& v) {
    ordered_json a = ordered_json::array();
    for (const auto& [w, c] : v) a.push_back({{"word", w}, {"count", c}});
    return a;
  };
  ordered_json j;
  j["n"] = r.n;
  j["list_size"] = r.list_size;
  j["distinct_used"] = r.distinct_used;
  j["coverage_fraction"] = r.coverage_fraction;
  j["top_k"] = pairs(r.top_k);
  j["invalid_words"] = pairs(r.invalid_words);
  return j;
}

inline ordered_json to_json(const DiversityReport& r) {
  ordered_json j;
  j["documents"] = r.documents;
  j["word_count"] = r.word_count;
  j["cr"] = r.cr;
  j["cr_pos"] = r.cr_pos;
  j["nds"] = r.nds;
  j["hs"] = r.hs ? ordered_json(*r.hs) : ordered_json("skipped");
  return j;
}

inline ordered_json to_json(const CostReport& r) {
  ordered_json j;
  j["model"] = r.model;
  j["rows"] = r.rows;
  j["wall_time_s"] = r.wall_time_s;
  j["input_tokens"] = r.input_tokens;
  j["output_tokens"] = r.output_tokens;
  j["total_tokens"] = r.total_tokens;
  j["price_dollars"] = r.price_4dp();
  j["price_display"] = format_dollars(r.price_cents());
  j["per_row_time_s"] = r.per_row_time_s;
  j["per_row_price"] = r.per_row_price;
  return j;
}

inline ordered_json to_json(const CostProjection& p) {
  ordered_json j;
  j["model"] = p.model;
  j["source_rows"] = p.source_rows;
  j["target_rows"] = p.target_rows;
  j["input_tokens"] = p.input_tokens;
  j["output_tokens"] = p.output_tokens;
  j["price_token_basis"] = text::round_to(p.price_token_basis, 4);
  j["price_rounded_basis"] = text::round_to(p.price_rounded_basis, 4);
  j["wall_time_s"] = p.wall_time_s;
  j["wall_time_days"] = text::round_to(p.wall_time_days(), 4);
  return j;
}

/// Fixed-width text table; first row is the header.
inline std::string table(const std::vector<std::vector<std::string>>& rows) {
  if (rows.empty()) return {};
  std::vector<std::size_t> width(rows.front().size(), 0);
  for (const auto& r : rows)
    for (std::size_t c = 0; c < r.size() && c < width.size(); ++c) width[c] = std::max(width[c], r[c].size());
  std::string out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t c = 0; c < rows[i].size(); ++c) {
      if (c) out += "  ";
      out += rows[i][c];
      if (c + 1 < rows[i].size()) out.append(width[c] - rows[i][c].size(), ' ');
    }
    out += '\n';
    if (i == 0) {
      std::size_t total = 0;
      for (auto w : width) total += w;
      out.append(total + 2 * (width.size() - 1), '-');
      out += '\n';
    }
  }
  return out;
}

inline std::string table_csv(const std::vector<std::vector<std::string>>& rows) {
  std::string out;
  for (const auto& r : rows) out += csv::format_row(r);
  return out;
}

}  // namespace report

struct AssessOptions {
  std::filesystem::path output_dir;  // empty: no files written
  bool skip_hs = false;
  std::size_t parallelism = 4;
  std::size_t top_k = 5;
  std::string words = "builtin";
  PriceSheet prices = price_presets::gpt_4o_mini();
};

struct DatasetAssessment {
  std::string label;
  std::filesystem::path path;
  std::optional<MethodKind> method;
  std::size_t rows = 0;
  std::optional<AlignmentReport> alignment;
  WordUsageReport usage;
  std::vector<PrefixShare> prefixes;
  DiversityReport diversity;
  CostReport cost;
  std::string cost_time_source;  // "manifest" or "latency_sum"
};

struct AssessResult {
  std::vector<DatasetAssessment> datasets;
  nlohmann::ordered_json json;
  std::string text;  // human-readable comparison tables
  nlohmann::ordered_json timings;
};

namespace detail {

inline std::string unique_label(const std::filesystem::path& p, std::set<std::string>& used) {
  std::string base = p.stem().string();
  if (base.empty()) base = "dataset";
  std::string label = base;
  for (int k = 2; used.contains(label); ++k) label = base + "-" + std::to_string(k);
  used.insert(label);
  return label;
}

inline DatasetAssessment assess_one(const std::filesystem::path& path, const std::string& label, const WordList& list,
                                    const PosTagger& tagger, const AssessOptions& opts) {
  ReadOptions ropts;
  ropts.word_list = &list;
  const auto data = read_dataset(path, ropts);
  DatasetAssessment a;
  a.label = label;
  a.path = path;
  a.rows = data.size();
  a.method = data.front().gen.method;
  for (const auto& r : data)
    if (r.gen.method != *a.method) a.method.reset();

  bool any_scored = false;
  for (const auto& r : data) any_scored = any_scored || r.scoring.has_value();
  if (any_scored) a.alignment = compute_alignment(data);

  a.usage = word_usage(data, list, opts.top_k);
  std::vector<std::string> reviews;
  reviews.reserve(data.size());
  for (const auto& r : data) reviews.push_back(r.gen.review);
  a.prefixes = prefix_redundancy(reviews, 2);

  DiversityOptions dopts;
  dopts.parallelism = opts.parallelism;
  dopts.skip_hs = opts.skip_hs;
  a.diversity = full_report(reviews, tagger, dopts);

  // Generation cost: wall time from the generate manifest when there is one.
  double wall = 0.0;
  a.cost_time_source = "latency_sum";
  for (const auto& m : read_manifests(path))
    if (m.stage == "generate") {
      wall = m.wall_time_s;
      a.cost_time_source = "manifest";
    }
  if (a.cost_time_source == "latency_sum") {
    std::int64_t ms = 0;
    for (const auto& r : data) ms += r.gen.latency_ms;
    wall = static_cast<double>(ms) / 1000.0;
  }
  a.cost = tally(data, wall, opts.prices);
  return a;
}

}  // namespace detail

/// Alignment, usage, diversity and cost reports for one or more datasets,
/// plus side-by-side comparison tables. Report files are deterministic;
/// metric timings go to a separate timings.json.
inline AssessResult cmd_assess(const std::vector<std::filesystem::path>& inputs, const AssessOptions& opts) {
  if (inputs.empty()) throw Error(ErrorCode::InvalidArgument, "assess needs at least one dataset");
  const auto list = WordList::load(opts.words);
  const auto tagger = RuleTagger::builtin();
  AssessResult res;
  std::set<std::string> used;
  for (const auto& p : inputs)
    res.datasets.push_back(detail::assess_one(p, detail::unique_label(p, used), list, tagger, opts));

  using report::ordered_json;
  res.json["tool_version"] = kToolVersion;
  res.json["datasets"] = ordered_json::array();
  res.timings = ordered_json::object();
  for (const auto& a : res.datasets) {
    ordered_json d;
    d["label"] = a.label;
    d["file"] = a.path.filename().string();
    d["method"] = a.method ? ordered_json(to_string(*a.method)) : ordered_json("mixed");
    d["rows"] = a.rows;
    d["alignment"] = a.alignment ? report::to_json(*a.alignment) : ordered_json("unscored");
    d["word_usage"] = report::to_json(a.usage);
    ordered_json pre = ordered_json::array();
    for (std::size_t i = 0; i < std::min<std::size_t>(5, a.prefixes.size()); ++i)
      pre.push_back({{"prefix", a.prefixes[i].prefix}, {"fraction", a.prefixes[i].fraction}});
    d["prefix_redundancy"] = pre;
    d["diversity"] = report::to_json(a.diversity);
    d["cost"] = report::to_json(a.cost);
    d["cost"]["time_source"] = a.cost_time_source;
    res.json["datasets"].push_back(std::move(d));
    res.timings[a.label] = {{"cr_s", a.diversity.cr_seconds},
                            {"cr_pos_s", a.diversity.cr_pos_seconds},
                            {"hs_s", a.diversity.hs_seconds},
                            {"nds_s", a.diversity.nds_seconds}};
  }

  // Alignment table: statistics down, datasets across.
  std::vector<std::vector<std::string>> align{{"statistic"}};
  for (const auto& a : res.datasets) align[0].push_back(a.label);
  auto add_row = [&](const std::string& name, auto getter) {
    std::vector<std::string> row{name};
    for (const auto& a : res.datasets) row.push_back(a.alignment ? getter(*a.alignment) : std::string("unscored"));
    align.push_back(std::move(row));
  };
  add_row("n", [](const AlignmentReport& r) { return std::to_string(r.n); });
  add_row("mean_target", [](const AlignmentReport& r) { return text::format_fixed(r.mean_target, 4); });
  add_row("mean_evaluated", [](const AlignmentReport& r) { return text::format_fixed(r.mean_evaluated, 4); });
  add_row("var_target", [](const AlignmentReport& r) { return report::opt_text(r.var_target, 4); });
  add_row("var_evaluated", [](const AlignmentReport& r) { return report::opt_text(r.var_evaluated, 4); });
  add_row("mad", [](const AlignmentReport& r) { return text::format_fixed(r.mad, 4); });
  add_row("msd", [](const AlignmentReport& r) { return text::format_fixed(r.msd, 4); });
  add_row("pearson", [](const AlignmentReport& r) { return report::opt_text(r.pearson, 4); });
  add_row("t_stat", [](const AlignmentReport& r) { return report::opt_text(r.t_stat, 4); });

  std::vector<std::vector<std::string>> div{{"dataset", "words", "CR", "CR-POS", "NDS", "HS"}};
  for (const auto& a : res.datasets)
    div.push_back({a.label, std::to_string(a.diversity.word_count), text::format_fixed(a.diversity.cr, 3),
                   text::format_fixed(a.diversity.cr_pos, 3), text::format_fixed(a.diversity.nds, 3),
                   a.diversity.hs ? text::format_fixed(*a.diversity.hs, 3) : std::string("skipped")});

  std::vector<std::vector<std::string>> cost{{"dataset", "time_s", "input", "output", "total", "price"}};
  for (const auto& a : res.datasets)
    cost.push_back({a.label, text::format_fixed(a.cost.wall_time_s, 1), std::to_string(a.cost.input_tokens),
                    std::to_string(a.cost.output_tokens), std::to_string(a.cost.total_tokens),
                    format_dollars(a.cost.price_cents())});

  std::vector<std::vector<std::string>> usage{{"dataset", "distinct_used", "coverage", "top_words", "invalid"}};
  for (const auto& a : res.datasets) {
    std::string top;
    for (const auto& [w, c] : a.usage.top_k) top += (top.empty() ? "" : "; ") + w + ":" + std::to_string(c);
    std::size_t invalid = 0;
    for (const auto& [w, c] : a.usage.invalid_words) invalid += c;
    usage.push_back({a.label, std::to_string(a.usage.distinct_used) + "/" + std::to_string(a.usage.list_size),
                     text::format_fixed(a.usage.coverage_fraction, 3), top, std::to_string(invalid)});
  }

  res.text = "Alignment\n" + report::table(align) + "\nDiversity\n" + report::table(div) + "\nCost\n" +
             report::table(cost) + "\nWord usage\n" + report::table(usage);

  if (!opts.output_dir.empty()) {
    const auto& dir = opts.output_dir;
    std::filesystem::create_directories(dir);
    detail::write_file(dir / "assessment.json", res.json.dump(2) + "\n");
    detail::write_file(dir / "timings.json", res.timings.dump(2) + "\n");
    detail::write_file(dir / "summary.txt", res.text);
    detail::write_file(dir / "alignment.csv", report::table_csv(align));
    detail::write_file(dir / "diversity.csv", report::table_csv(div));
    detail::write_file(dir / "cost.csv", report::table_csv(cost));
    for (const auto& a : res.datasets) {
      if (!a.alignment) continue;
      detail::write_file(dir / (a.label + ".diff_histogram.csv"), report::histogram_csv(a.alignment->diff_histogram));
      detail::write_file(dir / (a.label + ".score_histogram.csv"), report::histogram_csv(a.alignment->score_histogram));
    }
  }
  return res;
}

struct ProjectCostInput {
  std::optional<std::filesystem::path> dataset;
  // Used when no dataset is given.
  std::size_t rows = 0;
  double wall_time_s = 0.0;
  std::int64_t input_tokens = 0;
  std::int64_t output_tokens = 0;
};

struct ProjectCostResult {
  CostReport report;
  CostProjection projection;
  std::optional<CostProjection> alt_projection;
  nlohmann::ordered_json json;
};

inline ProjectCostResult cmd_project_cost(const RunConfig& cfg, const ProjectCostInput& in) {
  cfg.prices.validate();
  ProjectCostResult res;
  if (in.dataset) {
    const auto data = read_dataset(*in.dataset);
    double wall = -1.0;
    for (const auto& m : read_manifests(*in.dataset))
      if (m.stage == "generate") wall = m.wall_time_s;
    if (wall < 0) {
      std::int64_t ms = 0;
      for (const auto& r : data) ms += r.gen.latency_ms;
      wall = static_cast<double>(ms) / 1000.0;
    }
    res.report = tally(data, wall, cfg.prices);
  } else {
    res.report = tally(in.rows, in.wall_time_s, in.input_tokens, in.output_tokens, cfg.prices);
  }
  res.projection = project(res.report, cfg.target_rows);
  if (cfg.alt_prices) res.alt_projection = project(res.report, cfg.target_rows, cfg.alt_prices);
  res.json["report"] = report::to_json(res.report);
  res.json["projection"] = report::to_json(res.projection);
  res.json["alt_projection"] =
      res.alt_projection ? report::to_json(*res.alt_projection) : nlohmann::ordered_json(nullptr);
  return res;
}

}  // namespace pdt
