#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pdtsynth/error.hpp"

namespace pdt::csv {

inline bool needs_quotes(std::string_view field) noexcept {
  if (field.empty()) return false;
  if (field.front() == ' ' || field.back() == ' ') return true;
  return field.find_first_of(",\"\r\n") != std::string_view::npos;
}

inline void append_field(std::string& out, std::string_view field) {
  if (!needs_quotes(field)) {
    out += field;
    return;
  }
  out += '"';
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
}

/// One RFC 4180 record terminated by LF.
inline std::string format_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    append_field(out, fields[i]);
  }
  out += '\n';
  return out;
}

struct Row {
  std::vector<std::string> fields;
  std::size_t line = 0;  // 1-based line where the record starts
};

/// Parses one record starting at `pos`. Quoted fields may span lines. On
/// success `pos` is left at the start of the next record. Returns nullopt for
/// an unterminated quote or stray characters after a closing quote.
inline std::optional<std::vector<std::string>> parse_record(std::string_view text, std::size_t& pos) {
  std::vector<std::string> fields;
  std::string field;
  std::size_t i = pos;
  bool quoted = false;
  bool field_was_quoted = false;
  for (;;) {
    if (i >= text.size()) {
      if (quoted) return std::nullopt;
      fields.push_back(std::move(field));
      pos = i;
      return fields;
    }
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          i += 2;
        } else {
          quoted = false;
          ++i;
        }
      } else {
        field += c;
        ++i;
      }
      continue;
    }
    if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
      field_was_quoted = false;
      ++i;
    } else if (c == '\n' || c == '\r') {
      fields.push_back(std::move(field));
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      pos = i + 1;
      return fields;
    } else if (c == '"' && field.empty() && !field_was_quoted) {
      quoted = true;
      field_was_quoted = true;
      ++i;
    } else if (field_was_quoted) {
      return std::nullopt;
    } else {
      field += c;
      ++i;
    }
  }
}

/// Parses a whole document. Blank lines are skipped.
inline std::vector<Row> parse_document(std::string_view text, const std::string& source = "csv") {
  std::vector<Row> rows;
  std::size_t pos = 0;
  std::size_t line = 1;
  if (text.substr(0, 3) == "\xEF\xBB\xBF") pos = 3;
  while (pos < text.size()) {
    if (text[pos] == '\n' || text[pos] == '\r') {
      if (text[pos] == '\n') ++line;
      ++pos;
      continue;
    }
    const std::size_t start = pos;
    auto rec = parse_record(text, pos);
    if (!rec) throw Error(ErrorCode::SchemaMismatch, source + ":" + std::to_string(line) + ": malformed CSV record");
    rows.push_back(Row{std::move(*rec), line});
    for (std::size_t k = start; k < pos; ++k)
      if (text[k] == '\n') ++line;
  }
  return rows;
}

}  // namespace pdt::csv
