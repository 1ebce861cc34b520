#pragma once

#include <string>
#include <vector>

namespace codazzi {

/// Shortest round-trip decimal form, locale independent.
std::string format_double(double v);

/// Writes `content` to `path` through a temporary file and rename.
void write_file_atomic(const std::string& path, const std::string& content);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const;  ///< -1 when absent
};

std::string table_to_csv(const Table& t);
Table read_csv(const std::string& path);

}  // namespace codazzi
