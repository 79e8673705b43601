#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace marlab::harness {

inline constexpr int kCsvSchemaVersion = 1;

// Canonical CSV number formatting: shortest %.12g form, negative zero
// flushed to zero so algebraically-zero columns compare equal bytewise.
std::string format_csv_double(double v);

class CsvFile {
 public:
  explicit CsvFile(const std::filesystem::path& path);
  void row(const std::vector<std::string>& cells);

 private:
  std::ofstream out_;
};

// Column layouts are versioned by kCsvSchemaVersion; tests pin them.
std::vector<std::string> episode_header(int n_agents);
std::vector<std::string> step_header(int n_agents);

// Minimal CSV reader for the plot/compare tools.
std::vector<std::vector<std::string>> read_csv(
    const std::filesystem::path& path);

}  // namespace marlab::harness
