#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace marlab::harness {

class PlotError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Collective extrinsic reward per episode, one series per seed.
struct RunSeries {
  std::string label;
  std::vector<std::vector<double>> per_seed;

  std::vector<double> mean() const;
};

// Reads seed_*/episodes.csv under a run directory; the label comes from
// summary.json when present, otherwise from the directory name.
RunSeries read_run_series(const std::filesystem::path& run_dir);

// Per-seed traces drawn translucent with the opaque mean on top.
void write_reward_curve_svg(const std::filesystem::path& path,
                            const RunSeries& series);

// Mean traces of several runs overlaid, with a legend.
void write_comparison_svg(const std::filesystem::path& path,
                          const std::vector<RunSeries>& runs);

// Writes <dir>/reward_curve.svg for every run directory plus a combined
// comparison plot; returns the list of files written.
std::vector<std::filesystem::path> emit_plots(
    const std::vector<std::filesystem::path>& run_dirs,
    const std::filesystem::path& comparison_path);

}  // namespace marlab::harness
