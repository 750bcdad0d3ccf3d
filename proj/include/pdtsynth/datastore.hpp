#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pdtsynth/csv.hpp"
#include "pdtsynth/error.hpp"
#include "pdtsynth/records.hpp"
#include "pdtsynth/rng.hpp"
#include "pdtsynth/text.hpp"
#include "pdtsynth/wordlist.hpp"

namespace pdt {

enum class DatasetFormat { Csv, Jsonl };

constexpr std::string_view to_string(DatasetFormat f) noexcept { return f == DatasetFormat::Csv ? "csv" : "jsonl"; }

inline std::optional<DatasetFormat> parse_format(std::string_view s) {
  if (text::iequals(s, "csv")) return DatasetFormat::Csv;
  if (text::iequals(s, "jsonl") || text::iequals(s, "ndjson")) return DatasetFormat::Jsonl;
  return std::nullopt;
}

namespace columns {

inline const std::vector<std::string>& core() {
  static const std::vector<std::string> c = {
      "id",     "method",          "target_score",   "word",       "word_valid",
      "review", "model_claimed_score", "evaluated_score", "confidence", "abs_diff",
      "prompt_tokens", "completion_tokens", "latency_ms"};
  return c;
}

inline const std::vector<std::string>& extra() {
  static const std::vector<std::string> c = {"retries_used", "offered_words", "base_score",   "adjusted_score",
                                             "explanation",  "scoring_model", "scoring_prompt"};
  return c;
}

inline bool is_known(std::string_view name) {
  const auto& a = core();
  const auto& b = extra();
  return std::find(a.begin(), a.end(), name) != a.end() || std::find(b.begin(), b.end(), name) != b.end();
}

}  // namespace columns

namespace detail {

inline std::string opt_double(const std::optional<double>& v) { return v ? text::format_double(*v) : std::string(); }

// Every known column as text; empty means absent.
inline std::map<std::string, std::string> record_fields(const DatasetRecord& r) {
  const auto& g = r.gen;
  std::map<std::string, std::string> f;
  f["id"] = std::to_string(g.id);
  f["method"] = std::string(to_string(g.method));
  f["target_score"] = text::format_double(g.target_score);
  f["word"] = g.word;
  f["word_valid"] = g.word_valid ? "true" : "false";
  f["review"] = g.review;
  f["model_claimed_score"] = opt_double(g.model_claimed_score);
  f["prompt_tokens"] = std::to_string(g.prompt_tokens);
  f["completion_tokens"] = std::to_string(g.completion_tokens);
  f["latency_ms"] = std::to_string(g.latency_ms);
  f["retries_used"] = std::to_string(g.retries_used);
  f["offered_words"] = g.offered_words ? text::join(*g.offered_words, ";") : std::string();
  if (r.scoring) {
    const auto& s = *r.scoring;
    f["evaluated_score"] = text::format_double(s.evaluated_score);
    f["confidence"] = std::string(to_string(s.confidence));
    f["abs_diff"] = text::format_double(s.abs_diff);
    f["base_score"] = opt_double(s.base_score);
    f["adjusted_score"] = opt_double(s.adjusted_score);
    f["explanation"] = s.explanation;
    f["scoring_model"] = s.scoring_model;
    f["scoring_prompt"] = std::string(to_string(s.scoring_prompt));
  }
  return f;
}

inline std::vector<std::string> annotation_columns(const Dataset& data) {
  std::vector<std::string> out;
  for (const auto& r : data)
    for (const auto& [k, v] : r.gen.annotations)
      if (std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
  return out;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for writing");
  out << content;
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "write to '" + path.string() + "' failed");
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

/// Canonical CSV text: header row, then one record per line (LF).
inline std::string dataset_to_csv(const Dataset& data) {
  std::vector<std::string> header = columns::core();
  header.insert(header.end(), columns::extra().begin(), columns::extra().end());
  const auto ann = detail::annotation_columns(data);
  header.insert(header.end(), ann.begin(), ann.end());

  std::string out = csv::format_row(header);
  std::vector<std::string> row;
  for (const auto& r : data) {
    auto f = detail::record_fields(r);
    row.clear();
    for (const auto& c : columns::core()) row.push_back(f[c]);
    for (const auto& c : columns::extra()) row.push_back(f[c]);
    for (const auto& c : ann) {
      std::string v;
      for (const auto& [k, val] : r.gen.annotations)
        if (k == c) v = val;
      row.push_back(std::move(v));
    }
    out += csv::format_row(row);
  }
  return out;
}

inline nlohmann::ordered_json record_to_json(const DatasetRecord& r) {
  using nlohmann::ordered_json;
  const auto& g = r.gen;
  auto num_or_null = [](const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); };
  ordered_json j;
  j["id"] = g.id;
  j["method"] = to_string(g.method);
  j["target_score"] = g.target_score;
  j["word"] = g.word;
  j["word_valid"] = g.word_valid;
  j["review"] = g.review;
  j["model_claimed_score"] = num_or_null(g.model_claimed_score);
  j["evaluated_score"] = r.scoring ? ordered_json(r.scoring->evaluated_score) : ordered_json(nullptr);
  j["confidence"] = r.scoring ? ordered_json(to_string(r.scoring->confidence)) : ordered_json(nullptr);
  j["abs_diff"] = r.scoring ? ordered_json(r.scoring->abs_diff) : ordered_json(nullptr);
  j["prompt_tokens"] = g.prompt_tokens;
  j["completion_tokens"] = g.completion_tokens;
  j["latency_ms"] = g.latency_ms;
  j["retries_used"] = g.retries_used;
  j["offered_words"] = g.offered_words ? ordered_json(*g.offered_words) : ordered_json(nullptr);
  if (r.scoring) {
    j["base_score"] = num_or_null(r.scoring->base_score);
    j["adjusted_score"] = num_or_null(r.scoring->adjusted_score);
    j["explanation"] = r.scoring->explanation;
    j["scoring_model"] = r.scoring->scoring_model;
    j["scoring_prompt"] = to_string(r.scoring->scoring_prompt);
  } else {
    for (const char* k : {"base_score", "adjusted_score", "explanation", "scoring_model", "scoring_prompt"})
      j[k] = nullptr;
  }
  if (!g.annotations.empty()) {
    ordered_json a = ordered_json::object();
    for (const auto& [k, v] : g.annotations) a[k] = v;
    j["annotations"] = std::move(a);
  }
  return j;
}

inline std::string dataset_to_jsonl(const Dataset& data) {
  std::string out;
  for (const auto& r : data) {
    out += record_to_json(r).dump(-1, ' ', false, nlohmann::ordered_json::error_handler_t::strict);
    out += '\n';
  }
  return out;
}

inline DatasetFormat format_for_path(const std::filesystem::path& path) {
  const auto ext = text::ascii_lower(path.extension().string());
  if (ext == ".jsonl" || ext == ".ndjson" || ext == ".json") return DatasetFormat::Jsonl;
  return DatasetFormat::Csv;
}

inline void write_dataset(const Dataset& data, const std::filesystem::path& path,
                          std::optional<DatasetFormat> format = std::nullopt) {
  const auto fmt = format.value_or(format_for_path(path));
  detail::write_file(path, fmt == DatasetFormat::Csv ? dataset_to_csv(data) : dataset_to_jsonl(data));
}

struct ReadOptions {
  /// File column name -> canonical column name, applied before the built-in aliases.
  std::map<std::string, std::string> column_map;
  /// Used when the file has no method column.
  std::optional<MethodKind> default_method;
  /// When set and the file has no word_valid column, validity is computed against it.
  const WordList* word_list = nullptr;
  std::optional<DatasetFormat> format;
};

namespace detail {

inline std::string normalize_header(std::string_view h) {
  std::string out;
  for (char c : text::trim(h)) out += (c == ' ' || c == '-') ? '_' : text::ascii_lower(c);
  return out;
}

inline std::string canonical_column(std::string_view raw, const ReadOptions& opts) {
  const std::string key(text::trim(raw));
  if (auto it = opts.column_map.find(key); it != opts.column_map.end()) return it->second;
  const auto n = normalize_header(key);
  if (columns::is_known(n)) return n;
  static const std::map<std::string, std::string> aliases = {
      {"score", "target_score"},         {"target", "target_score"},     {"sentiment", "target_score"},
      {"sentiment_score", "target_score"}, {"target_sentiment", "target_score"},
      {"text", "review"},                {"comment", "review"},          {"response", "review"},
      {"pdt_word", "word"},              {"choice", "word"},             {"word_choice", "word"},
      {"evaluated", "evaluated_score"},  {"evaluation", "evaluated_score"}, {"eval_score", "evaluated_score"},
      {"input_tokens", "prompt_tokens"}, {"output_tokens", "completion_tokens"},
  };
  if (auto it = aliases.find(n); it != aliases.end()) return it->second;
  return key;  // annotation, original spelling
}

struct RawRow {
  std::map<std::string, std::string> known;
  Annotations annotations;
  std::size_t line = 0;
};

inline std::optional<bool> parse_bool(std::string_view s) {
  s = text::trim(s);
  if (text::iequals(s, "true") || s == "1" || text::iequals(s, "yes")) return true;
  if (text::iequals(s, "false") || s == "0" || text::iequals(s, "no")) return false;
  return std::nullopt;
}

inline DatasetRecord build_record(const RawRow& row, std::size_t index, const ReadOptions& opts,
                                  const std::string& source) {
  const auto where = source + ":" + std::to_string(row.line) + ": ";
  auto get = [&](const char* k) -> std::optional<std::string> {
    auto it = row.known.find(k);
    if (it == row.known.end() || it->second.empty()) return std::nullopt;
    return it->second;
  };
  auto req_double = [&](const char* k, const std::string& v) {
    auto d = text::parse_double(v);
    if (!d || !std::isfinite(*d)) throw Error(ErrorCode::SchemaMismatch, where + k + " is not a number: '" + v + "'");
    return *d;
  };
  auto opt_double = [&](const char* k) -> std::optional<double> {
    if (auto v = get(k)) return req_double(k, *v);
    return std::nullopt;
  };
  auto int_field = [&](const char* k, std::int64_t dflt) {
    if (auto v = get(k)) {
      auto i = text::parse_int<std::int64_t>(*v);
      if (!i) throw Error(ErrorCode::SchemaMismatch, where + k + " is not an integer: '" + *v + "'");
      return *i;
    }
    return dflt;
  };

  DatasetRecord out;
  auto& g = out.gen;
  g.id = static_cast<std::uint64_t>(int_field("id", static_cast<std::int64_t>(index + 1)));
  if (auto m = get("method")) {
    auto pm = parse_method(*m);
    if (!pm) throw Error(ErrorCode::SchemaMismatch, where + "unknown method '" + *m + "'");
    g.method = *pm;
  } else {
    g.method = opts.default_method.value_or(MethodKind::WordReview);
  }
  g.target_score = req_double("target_score", get("target_score").value_or(""));
  g.word = get("word").value_or("");
  g.review = get("review").value_or("");
  if (auto v = get("word_valid")) {
    auto b = parse_bool(*v);
    if (!b) throw Error(ErrorCode::SchemaMismatch, where + "word_valid is not a boolean: '" + *v + "'");
    g.word_valid = *b;
  } else if (opts.word_list) {
    g.word_valid = opts.word_list->validate_choice(g.word).valid;
  }
  g.model_claimed_score = opt_double("model_claimed_score");
  g.prompt_tokens = int_field("prompt_tokens", 0);
  g.completion_tokens = int_field("completion_tokens", 0);
  g.latency_ms = int_field("latency_ms", 0);
  g.retries_used = static_cast<int>(int_field("retries_used", 0));
  if (auto v = get("offered_words")) {
    std::vector<std::string> words;
    for (auto w : text::split(*v, ';')) words.emplace_back(w);
    g.offered_words = std::move(words);
  }
  g.annotations = row.annotations;

  if (auto ev = opt_double("evaluated_score")) {
    Scoring s;
    s.evaluated_score = *ev;
    if (auto c = get("confidence")) {
      auto pc = parse_confidence(*c);
      if (!pc) throw Error(ErrorCode::SchemaMismatch, where + "unknown confidence '" + *c + "'");
      s.confidence = *pc;
    }
    s.abs_diff = opt_double("abs_diff").value_or(std::fabs(g.target_score - s.evaluated_score));
    s.base_score = opt_double("base_score");
    s.adjusted_score = opt_double("adjusted_score");
    s.explanation = get("explanation").value_or("");
    s.scoring_model = get("scoring_model").value_or("");
    if (auto p = get("scoring_prompt")) {
      auto pp = parse_scoring_prompt(*p);
      if (!pp) throw Error(ErrorCode::SchemaMismatch, where + "unknown scoring prompt '" + *p + "'");
      s.scoring_prompt = *pp;
    }
    out.scoring = std::move(s);
  }
  return out;
}

inline std::vector<RawRow> csv_rows(std::string_view content, const ReadOptions& opts, const std::string& source) {
  auto rows = csv::parse_document(content, source);
  if (rows.empty()) throw Error(ErrorCode::SchemaMismatch, source + ": empty dataset file");
  std::vector<std::string> names;
  for (const auto& h : rows.front().fields) names.push_back(canonical_column(h, opts));
  for (const char* required : {"review", "target_score"})
    if (std::find(names.begin(), names.end(), required) == names.end())
      throw Error(ErrorCode::SchemaMismatch, source + ": missing required column '" + required + "'");
  std::vector<RawRow> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& fields = rows[r].fields;
    if (fields.size() != names.size())
      throw Error(ErrorCode::SchemaMismatch, source + ":" + std::to_string(rows[r].line) + ": expected " +
                                                 std::to_string(names.size()) + " fields, found " +
                                                 std::to_string(fields.size()));
    RawRow raw;
    raw.line = rows[r].line;
    for (std::size_t c = 0; c < names.size(); ++c) {
      if (columns::is_known(names[c]))
        raw.known[names[c]] = fields[c];
      else
        raw.annotations.emplace_back(names[c], fields[c]);
    }
    out.push_back(std::move(raw));
  }
  return out;
}

inline std::string json_scalar_text(const nlohmann::ordered_json& v) {
  if (v.is_null()) return {};
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  if (v.is_number_float()) return text::format_double(v.get<double>());
  return v.dump();
}

inline std::vector<RawRow> jsonl_rows(std::string_view content, const ReadOptions& opts, const std::string& source) {
  std::vector<RawRow> out;
  std::size_t line_no = 0;
  bool saw_review = false;
  bool saw_target = false;
  for (auto line : text::split(content, '\n')) {
    ++line_no;
    if (line_no == 1 && line.substr(0, 3) == "\xEF\xBB\xBF") line.remove_prefix(3);
    if (text::trim(line).empty()) continue;
    nlohmann::ordered_json obj;  // keeps annotation order
    try {
      obj = nlohmann::ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::SchemaMismatch, source + ":" + std::to_string(line_no) + ": malformed JSON: " + e.what());
    }
    if (!obj.is_object())
      throw Error(ErrorCode::SchemaMismatch, source + ":" + std::to_string(line_no) + ": expected a JSON object");
    RawRow raw;
    raw.line = line_no;
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (it.key() == "annotations" && it->is_object()) {
        for (auto a = it->begin(); a != it->end(); ++a) raw.annotations.emplace_back(a.key(), json_scalar_text(*a));
        continue;
      }
      const auto name = canonical_column(it.key(), opts);
      if (name == "offered_words" && it->is_array()) {
        std::vector<std::string> words;
        for (const auto& w : *it) words.push_back(json_scalar_text(w));
        raw.known[name] = text::join(words, ";");
      } else if (columns::is_known(name)) {
        raw.known[name] = json_scalar_text(*it);
      } else {
        raw.annotations.emplace_back(name, json_scalar_text(*it));
      }
    }
    saw_review = saw_review || raw.known.contains("review");
    saw_target = saw_target || raw.known.contains("target_score");
    out.push_back(std::move(raw));
  }
  if (out.empty()) throw Error(ErrorCode::SchemaMismatch, source + ": empty dataset file");
  if (!saw_review) throw Error(ErrorCode::SchemaMismatch, source + ": missing required field 'review'");
  if (!saw_target) throw Error(ErrorCode::SchemaMismatch, source + ": missing required field 'target_score'");
  return out;
}

}  // namespace detail

/// Parses dataset text. Format comes from `opts.format`, else from the first
/// non-blank character ('{' means JSONL).
inline Dataset parse_dataset(std::string_view content, const ReadOptions& opts = {},
                             const std::string& source = "dataset") {
  auto fmt = opts.format;
  if (!fmt) {
    const auto first = content.find_first_not_of(" \t\r\n\xEF\xBB\xBF");
    if (first == std::string_view::npos) throw Error(ErrorCode::SchemaMismatch, source + ": empty dataset file");
    fmt = content[first] == '{' ? DatasetFormat::Jsonl : DatasetFormat::Csv;
  }
  const auto rows = *fmt == DatasetFormat::Csv ? detail::csv_rows(content, opts, source)
                                               : detail::jsonl_rows(content, opts, source);
  Dataset out;
  out.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out.push_back(detail::build_record(rows[i], i, opts, source));
  return out;
}

/// Reads a dataset, sniffing the format from the extension and then the content.
inline Dataset read_dataset(const std::filesystem::path& path, ReadOptions opts = {}) {
  const auto content = detail::read_file(path);
  if (!opts.format) {
    const auto ext = text::ascii_lower(path.extension().string());
    if (ext == ".csv")
      opts.format = DatasetFormat::Csv;
    else if (ext == ".jsonl" || ext == ".ndjson")
      opts.format = DatasetFormat::Jsonl;
  }
  if (text::trim(content).empty()) throw Error(ErrorCode::SchemaMismatch, path.string() + ": empty dataset file");
  return parse_dataset(content, opts, path.string());
}

inline std::vector<GenerationRecord> generation_records(const Dataset& data) {
  std::vector<GenerationRecord> out;
  out.reserve(data.size());
  for (const auto& r : data) out.push_back(r.gen);
  return out;
}

// ---------------------------------------------------------------- manifests

struct RunManifest {
  std::string run_id;
  std::string stage;  // "generate" or "score"
  std::string method;
  std::string model;
  std::string scoring_model;
  std::string scoring_prompt;
  std::string system_prompt_template;
  std::string format_suffix;
  std::string user_prompt_template;
  std::string scoring_instruction;
  std::string prompt_version;
  std::optional<std::uint64_t> seed;
  std::string product;
  std::string word_list;
  std::size_t rows = 0;
  std::string clock;  // "wall" or "logical"
  std::string started_at;
  std::string finished_at;
  double wall_time_s = 0.0;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  std::int64_t requests = 0;
  std::string price_model;
  double price_input_per_million = 0.0;
  double price_output_per_million = 0.0;
  std::string provider;
  std::string tool_version;
  std::string dataset;  // file name of the dataset this entry describes

  friend bool operator==(const RunManifest&, const RunManifest&) = default;
};

inline nlohmann::ordered_json to_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["run_id"] = m.run_id;
  j["stage"] = m.stage;
  j["method"] = m.method;
  j["model"] = m.model;
  j["scoring_model"] = m.scoring_model;
  j["scoring_prompt"] = m.scoring_prompt;
  j["system_prompt_template"] = m.system_prompt_template;
  j["format_suffix"] = m.format_suffix;
  j["user_prompt_template"] = m.user_prompt_template;
  j["scoring_instruction"] = m.scoring_instruction;
  j["prompt_version"] = m.prompt_version;
  j["seed"] = m.seed ? nlohmann::ordered_json(*m.seed) : nlohmann::ordered_json(nullptr);
  j["product"] = m.product;
  j["word_list"] = m.word_list;
  j["rows"] = m.rows;
  j["clock"] = m.clock;
  j["started_at"] = m.started_at;
  j["finished_at"] = m.finished_at;
  j["wall_time_s"] = m.wall_time_s;
  j["prompt_tokens"] = m.prompt_tokens;
  j["completion_tokens"] = m.completion_tokens;
  j["total_tokens"] = m.prompt_tokens + m.completion_tokens;
  j["requests"] = m.requests;
  j["prices"] = {{"model", m.price_model},
                 {"input_per_million", m.price_input_per_million},
                 {"output_per_million", m.price_output_per_million}};
  j["provider"] = m.provider;
  j["tool_version"] = m.tool_version;
  j["dataset"] = m.dataset;
  return j;
}

inline RunManifest manifest_from_json(const nlohmann::json& j) {
  RunManifest m;
  auto s = [&](const char* k) { return j.contains(k) && j[k].is_string() ? j[k].get<std::string>() : std::string(); };
  m.run_id = s("run_id");
  m.stage = s("stage");
  m.method = s("method");
  m.model = s("model");
  m.scoring_model = s("scoring_model");
  m.scoring_prompt = s("scoring_prompt");
  m.system_prompt_template = s("system_prompt_template");
  m.format_suffix = s("format_suffix");
  m.user_prompt_template = s("user_prompt_template");
  m.scoring_instruction = s("scoring_instruction");
  m.prompt_version = s("prompt_version");
  if (j.contains("seed") && j["seed"].is_number_unsigned()) m.seed = j["seed"].get<std::uint64_t>();
  m.product = s("product");
  m.word_list = s("word_list");
  m.rows = j.value("rows", std::size_t{0});
  m.clock = s("clock");
  m.started_at = s("started_at");
  m.finished_at = s("finished_at");
  m.wall_time_s = j.value("wall_time_s", 0.0);
  m.prompt_tokens = j.value("prompt_tokens", std::int64_t{0});
  m.completion_tokens = j.value("completion_tokens", std::int64_t{0});
  m.requests = j.value("requests", std::int64_t{0});
  if (j.contains("prices") && j["prices"].is_object()) {
    const auto& p = j["prices"];
    m.price_model = p.value("model", std::string());
    m.price_input_per_million = p.value("input_per_million", 0.0);
    m.price_output_per_million = p.value("output_per_million", 0.0);
  }
  m.provider = s("provider");
  m.tool_version = s("tool_version");
  m.dataset = s("dataset");
  return m;
}

inline std::filesystem::path manifest_path_for(const std::filesystem::path& dataset) {
  return std::filesystem::path(dataset.string() + ".manifest.jsonl");
}

/// Entries of a dataset's manifest sidecar, oldest first. Missing sidecar -> empty.
inline std::vector<RunManifest> read_manifests(const std::filesystem::path& dataset) {
  const auto path = manifest_path_for(dataset);
  std::vector<RunManifest> out;
  if (!std::filesystem::exists(path)) return out;
  const auto content = detail::read_file(path);
  std::size_t line_no = 0;
  for (auto line : text::split(content, '\n')) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      out.push_back(manifest_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::SchemaMismatch, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

/// Appends one entry to the sidecar.
inline void append_manifest(const std::filesystem::path& dataset, const RunManifest& m) {
  const auto path = manifest_path_for(dataset);
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for appending");
  out << to_json(m).dump() << '\n';
  if (!out) throw Error(ErrorCode::IoError, "append to '" + path.string() + "' failed");
}

/// Starts a fresh sidecar for a newly written dataset: the lineage of its
/// inputs (possibly empty), then this run.
inline void write_manifest_chain(const std::filesystem::path& dataset, const std::vector<RunManifest>& lineage,
                                 const RunManifest& m) {
  std::string content;
  for (const auto& prior : lineage) content += to_json(prior).dump() + '\n';
  content += to_json(m).dump() + '\n';
  detail::write_file(manifest_path_for(dataset), content);
}

/// UUID version-4 layout from 128 bits.
inline std::string format_uuid(std::uint64_t hi, std::uint64_t lo) {
  hi = (hi & 0xFFFFFFFFFFFF0FFFULL) | 0x0000000000004000ULL;
  lo = (lo & 0x3FFFFFFFFFFFFFFFULL) | 0x8000000000000000ULL;
  char buf[37];
  std::snprintf(buf, sizeof buf, "%08x-%04x-%04x-%04x-%012llx", static_cast<unsigned>(hi >> 32),
                static_cast<unsigned>((hi >> 16) & 0xFFFF), static_cast<unsigned>(hi & 0xFFFF),
                static_cast<unsigned>(lo >> 48), static_cast<unsigned long long>(lo & 0xFFFFFFFFFFFFULL));
  return buf;
}

inline std::string random_run_id() {
  std::random_device rd;
  const auto hi = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  const auto lo = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  return format_uuid(hi, lo);
}

/// Reproducible id for replayed runs: a hash of the identifying text.
inline std::string derived_run_id(std::string_view key) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : key) h = (h ^ c) * 0x100000001B3ULL;
  return format_uuid(splitmix64(h), splitmix64(h ^ 0xA5A5A5A5A5A5A5A5ULL));
}

/// ISO-8601 UTC with second resolution.
inline std::string iso_utc(std::time_t t) {
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace pdt
