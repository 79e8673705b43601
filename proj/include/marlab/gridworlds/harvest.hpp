#pragma once

#include <array>
#include <string>
#include <vector>

#include "marlab/envcore.hpp"
#include "marlab/gridworlds/cleanup.hpp"  // Cell, StepEvents

namespace marlab {

struct HarvestConfig {
  int width = 16;
  int height = 9;
  int n_agents = 4;
  int window = 7;
  int horizon = 500;
  // Respawn probability of an empty orchard cell by number of neighbouring
  // apples (8-neighbourhood).  Index 0 must stay 0: a patch with no apples
  // left is dead for the rest of the episode.
  std::array<double, 9> regrowth_prob = {0.0, 0.005, 0.02, 0.05, 0.05,
                                         0.05, 0.05,  0.05, 0.05};
};

// Common-pool-resource gridworld: apples regrow only next to surviving
// apples, so stripping a patch bare kills it.
// Actions: 0 up, 1 down, 2 left, 3 right, 4 stay, 5 punish beam.
class HarvestEnv final : public Env {
 public:
  static constexpr Action kUp = 0, kDown = 1, kLeft = 2, kRight = 3,
                          kStay = 4, kPunish = 5;
  static constexpr int kActions = 6;
  static constexpr int kBeamLength = 3;

  explicit HarvestEnv(const HarvestConfig& config);
  // Map characters: 'A' apple, 'a' empty orchard cell, '.' plain ground,
  // '0'..'9' agent start.
  HarvestEnv(const HarvestConfig& config, const std::vector<std::string>& map);

  int n_agents() const override { return config_.n_agents; }
  int n_actions() const override { return kActions; }
  std::vector<Observation> reset(std::uint64_t seed) override;
  Transition step(const JointAction& joint) override;

  int apple_count() const;
  const StepEvents& last_events() const { return events_; }
  Cell cell(int x, int y) const { return grid_[index(x, y)]; }
  std::pair<int, int> agent_position(AgentId k) const { return pos_[k]; }
  Observation observe(AgentId k) const;
  int apple_neighbours(int x, int y) const;

 private:
  int index(int x, int y) const { return y * config_.width + x; }
  bool in_bounds(int x, int y) const {
    return x >= 0 && x < config_.width && y >= 0 && y < config_.height;
  }
  bool occupied(int x, int y) const;
  void build_default_map();
  void apply_map(const std::vector<std::string>& map);
  std::vector<Observation> observe_all() const;

  HarvestConfig config_;
  std::vector<Cell> grid_;
  std::vector<bool> orchard_mask_;  // cells where apples can (re)grow
  std::vector<std::pair<int, int>> pos_;
  std::vector<std::pair<int, int>> start_pos_;
  std::vector<int> facing_;
  std::vector<Cell> initial_grid_;
  RngStream rng_{0};
  StepEvents events_;
  JointAction prev_joint_;
  int step_index_ = 0;
  bool done_ = true;
  bool ready_ = false;
};

}  // namespace marlab
