#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace specforge {

// Comma-separated values: UTF-8, optional BOM, RFC 4180 quoting, first row
// holds the column names. Blank lines are skipped.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> lines;  // source line of each row

  // Index of a header column, or npos.
  std::size_t column(std::string_view name) const;
};

// Throws ParseError (with the line) on unterminated quotes and ragged rows.
CsvTable parse_csv(std::string_view text, std::string_view context);
CsvTable read_csv(const std::filesystem::path& path);

std::string csv_escape(std::string_view field);

}  // namespace specforge
