#include "odlab/csv.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

#include "odlab/errors.hpp"

namespace odlab {

std::string format_real(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string format_real_short(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_real(std::string_view s) {
  double v = 0.0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ValidationError("not a real number: '" + std::string(s) + "'");
  }
  return v;
}

std::int64_t parse_int(std::string_view s) {
  std::int64_t v = 0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ValidationError("not an integer: '" + std::string(s) + "'");
  }
  return v;
}

CsvWriter::CsvWriter(std::ostream& out, std::vector<std::string> columns)
    : out_(out), columns_(std::move(columns)) {
  out_ << join(columns_, ",") << '\n';
}

void CsvWriter::separator() {
  if (cells_in_row_ > 0) out_ << ',';
  ++cells_in_row_;
}

CsvWriter& CsvWriter::cell(double x) {
  separator();
  out_ << format_real(x);
  return *this;
}

CsvWriter& CsvWriter::cell(std::int64_t x) {
  separator();
  out_ << x;
  return *this;
}

CsvWriter& CsvWriter::cell(std::string_view label) {
  separator();
  out_ << label;
  return *this;
}

void CsvWriter::end_row() {
  if (cells_in_row_ != columns_.size()) {
    throw InternalError("csv row has " + std::to_string(cells_in_row_) + " cells, header has " +
                        std::to_string(columns_.size()));
  }
  out_ << '\n';
  cells_in_row_ = 0;
}

std::string join(const std::vector<std::string>& items, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

}  // namespace odlab
