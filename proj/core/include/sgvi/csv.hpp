#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace sgvi {

// Comma-separated table with a header row. Fields are written verbatim, so
// they must not contain commas, quotes or line breaks.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const;
  double number(std::size_t row, std::string_view name) const;
};

// Shortest decimal text that parses back to exactly `x` ("%.17g"-class).
std::string format_double(double x);

std::string to_csv(const CsvTable& table);
CsvTable parse_csv(std::string_view text);

void write_csv(const std::string& path, const CsvTable& table);
CsvTable read_csv(const std::string& path);

// Whole-file helpers used by the serializers.
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace sgvi
