#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace fvcg {

// Shortest decimal text that parses back to exactly `v`.
std::string format_number(double v);
// Inverse of format_number; throws ParseError on trailing garbage.
double parse_number(const std::string& text);

// Header plus rows of already-formatted cells. Cells containing a comma,
// quote or line break are quoted on output.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
  std::size_t column(const std::string& name) const;  // throws ParseError if absent

  friend bool operator==(const CsvTable&, const CsvTable&) = default;
};

std::string write_csv(const CsvTable& table);
CsvTable parse_csv(const std::string& text);

void save_csv(const CsvTable& table, const std::filesystem::path& path);
CsvTable load_csv(const std::filesystem::path& path);

}  // namespace fvcg
