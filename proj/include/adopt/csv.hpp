#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace adopt {

struct CsvRow {
  std::size_t line = 0;  // 1-based line number in the source
  std::vector<std::string> fields;
};

class CsvTable {
 public:
  std::vector<std::string> header;
  std::vector<CsvRow> rows;

  std::optional<std::size_t> column(std::string_view name) const;
  // Empty string when the row is short or the column is absent.
  std::string_view cell(const CsvRow& row, std::optional<std::size_t> col) const;
};

// RFC-4180 style: quoted fields, doubled quotes, CRLF, optional UTF-8 BOM.
// Blank lines and lines starting with '#' are skipped. Fields are trimmed.
CsvTable parse_csv(std::string_view content);

std::string csv_escape(std::string_view field);

std::string read_file(const std::filesystem::path& path);
// Writes to a sibling temp file and renames over the target.
void write_file(const std::filesystem::path& path, std::string_view content);

std::string trim(std::string_view text);
std::string to_lower(std::string_view text);
std::vector<std::string> split(std::string_view text, char sep);

}  // namespace adopt
