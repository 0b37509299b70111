#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "viscoctrl/errors.hpp"

namespace viscoctrl {

struct CsvRow {
  std::size_t line = 0;
  std::string label;           // first field when read with a label column
  std::vector<double> values;  // remaining fields
};

/// Reads comma-separated numeric rows. Blank lines and lines starting with
/// '#' are skipped. With first_field_label the first field is kept verbatim;
/// otherwise a leading non-numeric header row is skipped. Throws IoError with
/// the line number on malformed numbers.
std::vector<CsvRow> read_numeric_csv(const std::filesystem::path& path, bool first_field_label);

/// Shortest round-trip decimal form ("%.17g"-equivalent, '.' separator).
std::string format_number(double value);

/// Builds CSV text column by column. All columns must have the same length.
class CsvTable {
 public:
  void add_column(std::string name, std::vector<double> values);
  std::size_t rows() const noexcept;
  std::string to_string() const;

 private:
  std::vector<std::string> names_;
  std::vector<std::vector<double>> columns_;
};

/// Writes content to path through a sibling temporary file and a rename, so
/// the target either holds the full content or is left untouched.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace viscoctrl
