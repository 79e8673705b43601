#include "marlab/harness/metrics.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace marlab::harness {

std::string format_csv_double(double v) {
  if (v == 0.0) v = 0.0;  // flush -0
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

CsvFile::CsvFile(const std::filesystem::path& path) : out_(path) {
  if (!out_) {
    throw std::runtime_error("cannot open CSV file " + path.string());
  }
}

void CsvFile::row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    out_ << cells[i];
  }
  out_ << '\n';
}

namespace {

void append_agent_columns(std::vector<std::string>& h, int n_agents) {
  for (const char* base : {"extrinsic_", "intrinsic_", "mixed_"}) {
    for (int k = 0; k < n_agents; ++k) {
      h.push_back(base + std::to_string(k));
    }
  }
  for (int k = 0; k < n_agents; ++k) {
    for (int j = 0; j < n_agents; ++j) {
      if (j == k) continue;
      h.push_back("intention_" + std::to_string(k) + "_" + std::to_string(j));
    }
  }
  h.push_back("forward_loss");
  h.push_back("inverse_loss");
  h.push_back("moa_loss");
  h.push_back("epsilon");
}

}  // namespace

std::vector<std::string> episode_header(int n_agents) {
  std::vector<std::string> h = {"seed", "episode", "steps",
                                "collective_extrinsic"};
  append_agent_columns(h, n_agents);
  return h;
}

std::vector<std::string> step_header(int n_agents) {
  std::vector<std::string> h = {"seed", "episode", "step",
                                "collective_extrinsic"};
  append_agent_columns(h, n_agents);
  return h;
}

std::vector<std::vector<std::string>> read_csv(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot read CSV file " + path.string());
  }
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

}  // namespace marlab::harness
