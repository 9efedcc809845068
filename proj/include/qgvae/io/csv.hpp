#pragma once

#include <string>
#include <vector>

namespace qgvae::io {

// Minimal CSV table: doubles are rendered with %.17g so identical inputs
// always serialize to identical bytes.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

void write_csv(const std::string& path, const CsvTable& table);
CsvTable read_csv(const std::string& path);

}  // namespace qgvae::io
