#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace passval::csv {

struct Row {
  std::size_t line_no = 0;  // 1-based line number in the source
  std::vector<std::string> fields;
};

struct Table {
  std::vector<std::string> header;
  std::vector<Row> rows;

  std::optional<std::size_t> column(std::string_view name) const;
  // Throws ValidationError naming the context when the column is absent.
  std::size_t require_column(std::string_view name,
                             std::string_view context) const;
};

std::vector<std::string> split_line(std::string_view line);

Table read_table(const std::string& path);
Table parse_table(std::string_view text, std::string_view context);

std::optional<double> to_double(std::string_view s);
std::optional<std::int64_t> to_int(std::string_view s);

// Shortest round-trip representation; locale-free.
std::string fmt(double v);
std::string fmt(std::int64_t v);

void write_line(std::ostream& os, const std::vector<std::string>& fields);

}  // namespace passval::csv
