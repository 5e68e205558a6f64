#include "ghosteval/csv.h"

#include <cmath>
#include <cstdio>

namespace ghosteval::csv {

std::string format_real(double value) {
  if (!std::isfinite(value)) return std::string(kUndefined);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  std::string out(buf);
  if (out == "-0.000000") out = "0.000000";
  return out;
}

std::string format_real(std::optional<double> value) {
  return value ? format_real(*value) : std::string(kUndefined);
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

Writer::Writer(std::vector<std::string> header) : header_(std::move(header)) {}

Writer& Writer::field(std::string_view value) {
  current_.push_back(escape(value));
  return *this;
}

Writer& Writer::field(double value) {
  current_.push_back(format_real(value));
  return *this;
}

Writer& Writer::field(std::optional<double> value) {
  current_.push_back(format_real(value));
  return *this;
}

Writer& Writer::field(std::int64_t value) {
  current_.push_back(std::to_string(value));
  return *this;
}

Writer& Writer::empty() {
  current_.emplace_back();
  return *this;
}

void Writer::end_row() {
  rows_.push_back(std::move(current_));
  current_.clear();
}

std::string Writer::str() const {
  std::string out;
  if (!comment_.empty()) out += "# " + comment_ + "\n";
  auto append_row = [&out](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out.push_back(',');
      out += row[i];
    }
    out.push_back('\n');
  };
  std::vector<std::string> escaped;
  for (const auto& h : header_) escaped.push_back(escape(h));
  append_row(escaped);
  for (const auto& row : rows_) append_row(row);
  return out;
}

}  // namespace ghosteval::csv
