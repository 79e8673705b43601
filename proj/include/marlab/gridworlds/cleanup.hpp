#pragma once

#include <array>
#include <string>
#include <vector>

#include "marlab/envcore.hpp"

namespace marlab {

// Cell categories shared by the gridworld observations.  Exactly one
// category applies per cell; agents occlude whatever they stand on.
enum class Cell : std::uint8_t {
  outside = 0,
  empty = 1,
  river = 2,   // clean river
  waste = 3,
  apple = 4,
  agent = 5,
};
inline constexpr int kGridChannels = 6;

// Per-step event counters, used by tests to cross-check the reward
// decomposition and spawn streams.
struct StepEvents {
  int apples_consumed = 0;
  int apples_spawned = 0;
  int waste_spawned = 0;
  int waste_cleaned = 0;
  int clean_beams_fired = 0;
  int punish_beams_fired = 0;
  int punish_hits = 0;
};

struct CleanupConfig {
  int width = 18;
  int height = 9;
  int river_rows = 2;
  double waste_spawn_prob = 0.05;      // chance per step of one new waste cell
  double apple_spawn_prob_max = 0.02;  // per empty orchard cell, clean river
  double waste_threshold = 0.4;        // waste fraction above which no apples
  double initial_waste_fraction = 1.0;
  int n_agents = 5;
  int window = 7;
  int horizon = 500;
};

// Public-goods gridworld: apples only grow while the river is clean enough,
// cleaning and harvesting are mutually exclusive uses of a step.
// Actions: 0 up, 1 down, 2 left, 3 right, 4 stay, 5 clean beam, 6 punish beam.
class CleanupEnv final : public Env {
 public:
  static constexpr Action kUp = 0, kDown = 1, kLeft = 2, kRight = 3,
                          kStay = 4, kClean = 5, kPunish = 6;
  static constexpr int kActions = 7;
  static constexpr int kBeamLength = 3;

  explicit CleanupEnv(const CleanupConfig& config);
  // Test constructor: explicit map, one string per row.
  //   'R' clean river, 'W' waste, '.' empty, 'A' apple, '0'..'9' agent start.
  CleanupEnv(const CleanupConfig& config, const std::vector<std::string>& map);

  int n_agents() const override { return config_.n_agents; }
  int n_actions() const override { return kActions; }
  std::vector<Observation> reset(std::uint64_t seed) override;
  Transition step(const JointAction& joint) override;

  // Apple spawn probability per empty orchard cell at the given waste
  // fraction: linear from the maximum at 0 down to zero at the threshold.
  double spawn_probability(double waste_fraction) const;

  double waste_fraction() const;
  int apple_count() const;
  const StepEvents& last_events() const { return events_; }
  Cell cell(int x, int y) const { return grid_[index(x, y)]; }
  std::pair<int, int> agent_position(AgentId k) const { return pos_[k]; }
  Observation observe(AgentId k) const;

 private:
  int index(int x, int y) const { return y * config_.width + x; }
  bool in_bounds(int x, int y) const {
    return x >= 0 && x < config_.width && y >= 0 && y < config_.height;
  }
  bool occupied(int x, int y, AgentId* who = nullptr) const;
  void build_default_map();
  void apply_map(const std::vector<std::string>& map);
  std::vector<Observation> observe_all() const;

  CleanupConfig config_;
  std::vector<Cell> grid_;
  std::vector<bool> river_mask_;
  std::vector<std::pair<int, int>> pos_;
  std::vector<std::pair<int, int>> start_pos_;
  std::vector<int> facing_;  // action code of last movement, initially up
  std::vector<Cell> initial_grid_;
  RngStream rng_{0};
  StepEvents events_;
  JointAction prev_joint_;
  int step_index_ = 0;
  bool done_ = true;
  bool ready_ = false;
};

}  // namespace marlab
