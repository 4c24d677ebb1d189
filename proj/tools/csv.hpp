#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

namespace mvsde::cli {

/// Shortest round-trip decimal form; identical bits give identical text.
std::string format_double(double v);

using CsvCell = std::variant<std::string, double, long long, unsigned long long>;

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  void row(const std::vector<CsvCell>& cells);
  void close();

 private:
  std::ofstream out_;
  std::size_t columns_;
  std::string path_;
};

}  // namespace mvsde::cli
