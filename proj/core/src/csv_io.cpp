#include "viscoctrl/csv_io.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>
#include <system_error>

#include <fmt/format.h>

namespace viscoctrl {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_double(std::string_view text, double& out) {
  text = trim(text);
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size();
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

}  // namespace

std::vector<CsvRow> read_numeric_csv(const std::filesystem::path& path, bool first_field_label) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("{}: cannot open for reading", path.string()));
  std::vector<CsvRow> rows;
  std::string line;
  std::size_t number = 0;
  bool header_checked = false;
  while (std::getline(in, line)) {
    ++number;
    const auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto fields = split(text);
    CsvRow row;
    row.line = number;
    std::size_t first = 0;
    if (first_field_label) {
      row.label = std::string(fields.front());
      first = 1;
    }
    bool numeric = true;
    for (std::size_t i = first; i < fields.size(); ++i) {
      double v = 0.0;
      if (!parse_double(fields[i], v)) {
        numeric = false;
        break;
      }
      row.values.push_back(v);
    }
    if (!numeric) {
      if (!first_field_label && !header_checked) {
        header_checked = true;
        continue;
      }
      throw IoError(fmt::format("{}:{}: malformed numeric field", path.string(), number));
    }
    header_checked = true;
    rows.push_back(std::move(row));
  }
  if (in.bad()) throw IoError(fmt::format("{}: read error", path.string()));
  return rows;
}

std::string format_number(double value) { return fmt::format("{}", value); }

void CsvTable::add_column(std::string name, std::vector<double> values) {
  if (!columns_.empty() && values.size() != columns_.front().size()) {
    throw std::invalid_argument(fmt::format("csv column '{}' has {} rows, expected {}", name,
                                            values.size(), columns_.front().size()));
  }
  names_.push_back(std::move(name));
  columns_.push_back(std::move(values));
}

std::size_t CsvTable::rows() const noexcept { return columns_.empty() ? 0 : columns_.front().size(); }

std::string CsvTable::to_string() const {
  std::string out;
  for (std::size_t c = 0; c < names_.size(); ++c) {
    if (c) out += ',';
    out += names_[c];
  }
  out += '\n';
  for (std::size_t r = 0; r < rows(); ++r) {
    for (std::size_t c = 0; c < columns_.size(); ++c) {
      if (c) out += ',';
      out += format_number(columns_[c][r]);
    }
    out += '\n';
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(fmt::format("{}: cannot open for writing", tmp.string()));
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ignore;
      std::filesystem::remove(tmp, ignore);
      throw IoError(fmt::format("{}: write failed", tmp.string()));
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignore;
    std::filesystem::remove(tmp, ignore);
    throw IoError(fmt::format("{}: rename failed: {}", path.string(), ec.message()));
  }
}

}  // namespace viscoctrl
