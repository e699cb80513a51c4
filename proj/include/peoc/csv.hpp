#ifndef PEOC_CSV_HPP_
#define PEOC_CSV_HPP_

// Minimal comma-separated tables: no quoting, first line is the header.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace peoc::csv {

// Shortest representation that round-trips; "inf"/"-inf"/"nan" for
// non-finite values.
std::string format_double(double value);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> row_lines;  // 1-based source line of each row
};

// Throws ParseError when the header differs from `expected_header` (if
// given) or a row has the wrong number of fields.
Table parse(std::string_view text, const std::vector<std::string>& expected_header = {});

double parse_double(std::string_view field, std::size_t line);
std::int64_t parse_int(std::string_view field, std::size_t line);
std::uint64_t parse_u64(std::string_view field, std::size_t line);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace peoc::csv

#endif  // PEOC_CSV_HPP_
