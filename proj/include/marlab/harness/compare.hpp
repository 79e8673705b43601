#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace marlab::harness {

class ComparisonError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The slice of a run summary the method comparison needs.
struct MethodSummary {
  std::string method;
  std::string environment;
  std::vector<std::uint64_t> seeds;
  double tail_mean = 0.0;
  double tail_std = 0.0;
};

MethodSummary read_summary(const std::filesystem::path& path);

struct Comparison {
  std::vector<std::string> labels;
  std::vector<double> means;
  // percentage(i, j) = (means[i] - means[j]) / means[j] * 100
  Eigen::MatrixXd percentage;
};

// Requires at least two summaries over the same environment and seed set.
Comparison compare_methods(const std::vector<MethodSummary>& summaries);

std::string render_table(const Comparison& comparison);
std::string render_csv(const Comparison& comparison);

}  // namespace marlab::harness
