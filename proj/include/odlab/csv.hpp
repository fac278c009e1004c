#pragma once

#include <cstdint>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace odlab {

/// 17 significant digits, locale independent; reads back bit for bit.
std::string format_real(double x);
/// Shortest form that reads back to the same double. Used for config text.
std::string format_real_short(double x);

/// Strict decimal parse of the whole string; throws ValidationError otherwise.
double parse_real(std::string_view s);
std::int64_t parse_int(std::string_view s);

/// Comma-separated rows, '\n' endings, no quoting (cells are numbers or bare labels).
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::vector<std::string> columns);

  const std::vector<std::string>& columns() const noexcept { return columns_; }

  CsvWriter& cell(double x);
  CsvWriter& cell(std::int64_t x);
  CsvWriter& cell(std::string_view label);
  /// Terminates the row; throws if the cell count does not match the header.
  void end_row();

 private:
  void separator();

  std::ostream& out_;
  std::vector<std::string> columns_;
  std::size_t cells_in_row_ = 0;
};

std::string join(const std::vector<std::string>& items, std::string_view sep);

}  // namespace odlab
