#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace stscan::io {

/// Splits one CSV record. Double quotes protect commas; "" is a literal quote.
std::vector<std::string> split_csv_line(std::string_view line);

/// Quotes a field only when it needs it.
std::string csv_field(std::string_view value);

std::string trim(std::string_view s);

/// Shortest representation that parses back to the identical double.
std::string format_double(double value);

std::optional<double> parse_double(std::string_view s);
std::optional<std::int64_t> parse_int(std::string_view s);

std::vector<std::string> split(std::string_view s, char sep);

/// Reads a CSV file: header row plus records. Blank lines are skipped; the
/// returned line numbers are 1-based physical line numbers of the file.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;

  std::optional<std::size_t> column(std::string_view name) const;
};
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::filesystem::path& path);

/// Writes content to path through a temporary file and a rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

/// FNV-1a over the file contents; used to pin manifest inputs.
std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t v);

}  // namespace stscan::io
