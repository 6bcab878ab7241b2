#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gspsim/errors.hpp"
#include "gspsim/experiment.hpp"

namespace gspsim {

inline constexpr const char* kCsvHeader =
    "alpha,revenue,efficiency,relevance,revenue_norm,efficiency_norm,relevance_norm,auctions,seed";

/// Numbers render with 9 significant digits; shortest form, C locale.
inline std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

/// The exact bytes of the results CSV: header plus one row per grid point,
/// UTF-8, LF line endings.
inline std::string csv_string(const SweepResult& result) {
  std::string out(kCsvHeader);
  out.push_back('\n');
  for (const SweepRow& row : result.rows) {
    out += csv_number(row.alpha);
    out.push_back(',');
    out += csv_number(row.revenue);
    out.push_back(',');
    out += csv_number(row.efficiency);
    out.push_back(',');
    out += csv_number(row.relevance);
    out.push_back(',');
    out += csv_number(row.revenue_norm);
    out.push_back(',');
    out += csv_number(row.efficiency_norm);
    out.push_back(',');
    out += csv_number(row.relevance_norm);
    out.push_back(',');
    out += std::to_string(row.auctions);
    out.push_back(',');
    out += std::to_string(result.config.seed);
    out.push_back('\n');
  }
  return out;
}

inline void write_csv(const SweepResult& result, const std::filesystem::path& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open for writing: " + path.string());
  const std::string body = csv_string(result);
  file.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!file) throw IoError("write failed: " + path.string());
}

struct CsvData {
  std::vector<SweepRow> rows;
  std::uint64_t seed = 0;
};

/// Parses a file produced by write_csv back into rows.
inline CsvData read_csv(std::istream& in) {
  CsvData data;
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader)
    throw IoError("csv: missing or unexpected header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(fields, cell, ',')) cells.push_back(cell);
    if (cells.size() != 9) throw IoError("csv: malformed row: " + line);
    SweepRow row;
    row.alpha = std::strtod(cells[0].c_str(), nullptr);
    row.revenue = std::strtod(cells[1].c_str(), nullptr);
    row.efficiency = std::strtod(cells[2].c_str(), nullptr);
    row.relevance = std::strtod(cells[3].c_str(), nullptr);
    row.revenue_norm = std::strtod(cells[4].c_str(), nullptr);
    row.efficiency_norm = std::strtod(cells[5].c_str(), nullptr);
    row.relevance_norm = std::strtod(cells[6].c_str(), nullptr);
    row.auctions = std::strtoull(cells[7].c_str(), nullptr, 10);
    data.seed = std::strtoull(cells[8].c_str(), nullptr, 10);
    data.rows.push_back(row);
  }
  return data;
}

inline CsvData read_csv(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open for reading: " + path.string());
  return read_csv(file);
}

}  // namespace gspsim
