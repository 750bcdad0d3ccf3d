#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pdtsynth/error.hpp"
#include "pdtsynth/records.hpp"
#include "pdtsynth/text.hpp"

namespace pdt {

/// Dollar prices per million tokens for one model.
struct PriceSheet {
  std::string model;
  double input_per_million = 0.0;
  double output_per_million = 0.0;

  void validate() const {
    if (!(input_per_million >= 0.0) || !(output_per_million >= 0.0))
      throw Error(ErrorCode::ConfigError, "price sheet '" + model + "' has a negative price");
  }

  double price(std::int64_t input_tokens, std::int64_t output_tokens) const {
    return static_cast<double>(input_tokens) * input_per_million / 1e6 +
           static_cast<double>(output_tokens) * output_per_million / 1e6;
  }
};

namespace price_presets {

// October 2024 list prices.
inline PriceSheet gpt_4o_mini() { return {"gpt-4o-mini", 0.15, 0.60}; }
inline PriceSheet gpt_4o() { return {"gpt-4o", 2.50, 10.00}; }

inline std::optional<PriceSheet> by_name(const std::string& name) {
  if (name == "gpt-4o-mini") return gpt_4o_mini();
  if (name == "gpt-4o") return gpt_4o();
  return std::nullopt;
}

}  // namespace price_presets

struct CostReport {
  std::string model;
  std::size_t rows = 0;
  double wall_time_s = 0.0;
  std::int64_t input_tokens = 0;
  std::int64_t output_tokens = 0;
  std::int64_t total_tokens = 0;
  /// Unrounded dollars; see price_4dp() and price_cents() for presentation.
  double price_dollars = 0.0;
  double per_row_time_s = 0.0;
  double per_row_price = 0.0;

  double price_4dp() const { return text::round_to(price_dollars, 4); }
  double price_cents() const { return text::round_to(price_dollars, 2); }
};

inline std::string format_dollars(double v, int decimals = 2) { return "$" + text::format_fixed(v, decimals); }

/// Cost of a run from its token totals and wall time.
inline CostReport tally(std::size_t rows, double wall_time_s, std::int64_t input_tokens, std::int64_t output_tokens,
                        const PriceSheet& prices) {
  prices.validate();
  if (input_tokens < 0 || output_tokens < 0) throw Error(ErrorCode::MissingUsage, "negative token totals");
  CostReport r;
  r.model = prices.model;
  r.rows = rows;
  r.wall_time_s = wall_time_s;
  r.input_tokens = input_tokens;
  r.output_tokens = output_tokens;
  r.total_tokens = input_tokens + output_tokens;
  r.price_dollars = prices.price(input_tokens, output_tokens);
  if (rows > 0) {
    r.per_row_time_s = wall_time_s / static_cast<double>(rows);
    r.per_row_price = r.price_dollars / static_cast<double>(rows);
  }
  return r;
}

/// Cost of a dataset from its per-record generation usage.
inline CostReport tally(const Dataset& data, double wall_time_s, const PriceSheet& prices) {
  std::int64_t in = 0, out = 0;
  for (const auto& r : data) {
    if (r.gen.prompt_tokens < 0 || r.gen.completion_tokens < 0)
      throw Error(ErrorCode::MissingUsage, "record " + std::to_string(r.gen.id) + " has no token usage");
    in += r.gen.prompt_tokens;
    out += r.gen.completion_tokens;
  }
  return tally(data.size(), wall_time_s, in, out, prices);
}

struct CostProjection {
  std::size_t source_rows = 0;
  std::size_t target_rows = 0;
  double scale = 0.0;
  std::string model;
  std::int64_t input_tokens = 0;   // projected, rounded to whole tokens
  std::int64_t output_tokens = 0;
  /// Projected from exact token counts.
  double price_token_basis = 0.0;
  /// Projected from the cent-rounded run price, as a table would show it.
  double price_rounded_basis = 0.0;
  double wall_time_s = 0.0;
  double wall_time_days() const { return wall_time_s / 86400.0; }
};

/// Linear extrapolation of a run to `target_rows`, optionally re-priced.
inline CostProjection project(const CostReport& report, std::size_t target_rows,
                              const std::optional<PriceSheet>& alt_prices = std::nullopt) {
  if (report.rows == 0) throw Error(ErrorCode::ZeroRows, "cannot project from a run with zero rows");
  CostProjection p;
  p.source_rows = report.rows;
  p.target_rows = target_rows;
  p.scale = static_cast<double>(target_rows) / static_cast<double>(report.rows);
  p.input_tokens = std::llround(static_cast<double>(report.input_tokens) * p.scale);
  p.output_tokens = std::llround(static_cast<double>(report.output_tokens) * p.scale);
  double run_price = report.price_dollars;
  p.model = report.model;
  if (alt_prices) {
    alt_prices->validate();
    run_price = alt_prices->price(report.input_tokens, report.output_tokens);
    p.model = alt_prices->model;
  }
  p.price_token_basis = run_price * p.scale;
  p.price_rounded_basis = text::round_to(run_price, 2) * p.scale;
  p.wall_time_s = report.wall_time_s * p.scale;
  return p;
}

}  // namespace pdt
