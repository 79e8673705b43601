#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "marlab/agents.hpp"
#include "marlab/eicm.hpp"
#include "marlab/gridworlds/cleanup.hpp"
#include "marlab/gridworlds/harvest.hpp"
#include "marlab/social.hpp"

namespace marlab::harness {

// Configuration problems carry the offending key path in the message,
// e.g. "shaping.trace_decay: expected a number in [0, 1], got 1.5".
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Fully resolved experiment description.  Every knob that is not in the
// config file is filled with its documented default; obs-dependent widths
// (eicm.obs_dim, agent.input_dim) are resolved by the runner.
struct ExperimentConfig {
  int version = 1;
  std::string env_name;  // "cleanup" | "harvest"
  CleanupConfig cleanup;
  HarvestConfig harvest;
  int n_agents = 0;  // mirrored into the environment config
  int horizon = 500;
  ShapingParams shaping;
  EicmConfig eicm;
  DqnConfig agent;
  int episodes = 200;
  std::vector<std::uint64_t> seeds;
  std::string output_dir = "runs/out";
  bool log_per_step = false;
  int workers = 1;

  std::string source_text;            // verbatim config bytes, for provenance
  std::vector<std::string> warnings;  // coercions applied while parsing

  int env_n_actions() const;
  int env_window() const;
};

// Parses and validates a config document.  `source_name` only decorates
// error messages.
ExperimentConfig parse_config(const std::string& text,
                              const std::string& source_name = "<config>");

ExperimentConfig load_config(const std::filesystem::path& path);

// Named coefficient presets for the shaping module.
//   advantageous_guilt   envy 0,    guilt 0.05   (default regime)
//   advantageous_envy    envy 0.05, guilt 0
//   searched_ia          envy 0.6,  guilt -0.2
//   searched_kindmarl    envy 0,    guilt -1
void apply_shaping_preset(ShapingParams& params, const std::string& name,
                          int n_agents);

std::string method_name(Method method);
Method method_from_name(const std::string& name, const std::string& key_path);

}  // namespace marlab::harness
