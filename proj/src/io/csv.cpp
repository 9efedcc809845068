#include "qgvae/io/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "qgvae/common.hpp"

namespace qgvae::io {

void write_csv(const std::string& path, const CsvTable& table) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open for writing: " + path);
  for (std::size_t i = 0; i < table.columns.size(); ++i)
    os << (i ? "," : "") << table.columns[i];
  os << "\n";
  char buf[40];
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size())
      throw ShapeError("csv row width does not match the header");
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", row[i]);
      os << (i ? "," : "") << buf;
    }
    os << "\n";
  }
  if (!os) throw IoError("write failed: " + path);
}

CsvTable read_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open for reading: " + path);
  CsvTable t;
  std::string line;
  if (!std::getline(is, line)) throw IoError("empty csv: " + path);
  std::istringstream hs(line);
  for (std::string cell; std::getline(hs, cell, ',');) t.columns.push_back(cell);
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream rs(line);
    std::vector<double> row;
    for (std::string cell; std::getline(rs, cell, ',');) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw IoError(path + ":" + std::to_string(lineno) +
                      ": expected a number, got '" + cell + "'");
      }
    }
    if (row.size() != t.columns.size())
      throw IoError(path + ":" + std::to_string(lineno) + ": expected " +
                    std::to_string(t.columns.size()) + " cells, got " +
                    std::to_string(row.size()));
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace qgvae::io
