#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "marlab/harness/config.hpp"

namespace marlab::harness {

struct SeedResult {
  std::uint64_t seed = 0;
  bool failed = false;
  std::string error;
  double tail_mean_collective = 0.0;
  // first episode from which the series stays within the 1.1x / 1.2x
  // deviation band around the tail mean; -1 when it never settles
  int convergence_110 = -1;
  int convergence_120 = -1;
  std::vector<double> episode_collective;
};

struct ExperimentResult {
  std::filesystem::path output_dir;
  std::vector<SeedResult> seeds;
  double aggregate_mean = 0.0;
  double aggregate_std = 0.0;
  int completed = 0;
  bool any_failed() const {
    for (const auto& s : seeds) {
      if (s.failed) return true;
    }
    return false;
  }
};

inline constexpr double kTailFraction = 0.2;

// Output directory after the MARLAB_OUTPUT_ROOT override (relative
// output_dir values are placed under the root when the variable is set).
std::filesystem::path resolve_output_dir(const ExperimentConfig& config);

std::unique_ptr<Env> make_env(const ExperimentConfig& config);

// Trains one seed and writes seed_<seed>/episodes.csv (and steps.csv when
// per-step logging is on) plus a final checkpoint.
SeedResult run_seed(const ExperimentConfig& config, std::uint64_t seed,
                    const std::filesystem::path& outdir);

// Runs every seed (config.workers in parallel), echoes the config for
// provenance and writes summary.json.  A failing seed aborts only itself.
ExperimentResult run_experiment(const ExperimentConfig& config);

// Mean of the last ceil(tail_fraction * n) entries.
double tail_mean(const std::vector<double>& values, double tail_fraction);

// Generic tail-threshold convergence index: the smallest episode such that
// every later value deviates from the tail mean by at most
// (factor - 1) * max(1, |tail mean|).  Returns -1 when no suffix settles.
int convergence_episode(const std::vector<double>& values,
                        double tail_fraction, double factor);

}  // namespace marlab::harness
