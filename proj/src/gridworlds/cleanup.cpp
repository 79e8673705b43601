#include "marlab/gridworlds/cleanup.hpp"

#include <algorithm>
#include <cmath>

namespace marlab {

namespace {

// dx, dy for the four movement actions (up, down, left, right)
constexpr int kDx[4] = {0, 0, -1, 1};
constexpr int kDy[4] = {-1, 1, 0, 0};

}  // namespace

CleanupEnv::CleanupEnv(const CleanupConfig& config) : config_(config) {
  build_default_map();
}

CleanupEnv::CleanupEnv(const CleanupConfig& config,
                       const std::vector<std::string>& map)
    : config_(config) {
  apply_map(map);
}

void CleanupEnv::build_default_map() {
  const int w = config_.width, h = config_.height;
  grid_.assign(static_cast<std::size_t>(w) * h, Cell::empty);
  river_mask_.assign(grid_.size(), false);
  const int river_cells = config_.river_rows * w;
  const int waste_cells = static_cast<int>(
      std::lround(config_.initial_waste_fraction * river_cells));
  int river_seen = 0;
  for (int y = 0; y < config_.river_rows; ++y) {
    for (int x = 0; x < w; ++x) {
      river_mask_[index(x, y)] = true;
      grid_[index(x, y)] = river_seen < waste_cells ? Cell::waste : Cell::river;
      ++river_seen;
    }
  }
  start_pos_.clear();
  const int row = std::min(config_.river_rows, h - 1);
  for (int k = 0; k < config_.n_agents; ++k) {
    int x = (k + 1) * w / (config_.n_agents + 1);
    start_pos_.emplace_back(std::min(x, w - 1), row);
  }
  initial_grid_ = grid_;
}

void CleanupEnv::apply_map(const std::vector<std::string>& map) {
  config_.height = static_cast<int>(map.size());
  config_.width = static_cast<int>(map.at(0).size());
  grid_.assign(static_cast<std::size_t>(config_.width) * config_.height,
               Cell::empty);
  river_mask_.assign(grid_.size(), false);
  start_pos_.assign(config_.n_agents, {-1, -1});
  for (int y = 0; y < config_.height; ++y) {
    if (static_cast<int>(map[y].size()) != config_.width) {
      throw EnvContractError("cleanup map rows must have equal width");
    }
    for (int x = 0; x < config_.width; ++x) {
      const char c = map[y][x];
      const int i = index(x, y);
      switch (c) {
        case 'R': river_mask_[i] = true; grid_[i] = Cell::river; break;
        case 'W': river_mask_[i] = true; grid_[i] = Cell::waste; break;
        case 'A': grid_[i] = Cell::apple; break;
        case '.': break;
        default:
          if (c >= '0' && c <= '9') {
            const int k = c - '0';
            if (k >= config_.n_agents) {
              throw EnvContractError("cleanup map agent id out of range");
            }
            start_pos_[k] = {x, y};
          } else {
            throw EnvContractError("cleanup map has unknown character");
          }
      }
    }
  }
  for (const auto& p : start_pos_) {
    if (p.first < 0) {
      throw EnvContractError("cleanup map missing an agent start");
    }
  }
  initial_grid_ = grid_;
}

std::vector<Observation> CleanupEnv::reset(std::uint64_t seed) {
  rng_ = RngStream(seed);
  grid_ = initial_grid_;
  pos_ = start_pos_;
  facing_.assign(config_.n_agents, kUp);
  prev_joint_.assign(config_.n_agents, kStay);
  step_index_ = 0;
  done_ = false;
  ready_ = true;
  events_ = StepEvents{};
  return observe_all();
}

bool CleanupEnv::occupied(int x, int y, AgentId* who) const {
  for (AgentId k = 0; k < config_.n_agents; ++k) {
    if (pos_[k].first == x && pos_[k].second == y) {
      if (who) *who = k;
      return true;
    }
  }
  return false;
}

double CleanupEnv::spawn_probability(double waste_fraction) const {
  if (waste_fraction >= config_.waste_threshold) return 0.0;
  if (config_.waste_threshold <= 0.0) return 0.0;
  return config_.apple_spawn_prob_max *
         (1.0 - waste_fraction / config_.waste_threshold);
}

double CleanupEnv::waste_fraction() const {
  int river = 0, waste = 0;
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    if (river_mask_[i]) {
      ++river;
      if (grid_[i] == Cell::waste) ++waste;
    }
  }
  return river == 0 ? 0.0 : static_cast<double>(waste) / river;
}

int CleanupEnv::apple_count() const {
  return static_cast<int>(
      std::count(grid_.begin(), grid_.end(), Cell::apple));
}

Transition CleanupEnv::step(const JointAction& joint) {
  if (!ready_) throw EnvContractError("cleanup: step before reset");
  if (done_) throw EnvContractError("cleanup: step on a finished episode");
  check_joint_action(joint, config_.n_agents, kActions);

  Transition t;
  t.obs = observe_all();
  t.joint_action = joint;
  t.extrinsic = VectorXd::Zero(config_.n_agents);
  events_ = StepEvents{};

  // movement and apple pickup, lowest agent id first
  for (AgentId k = 0; k < config_.n_agents; ++k) {
    const Action a = joint[k];
    if (a > kRight) continue;
    facing_[k] = a;
    const int nx = pos_[k].first + kDx[a];
    const int ny = pos_[k].second + kDy[a];
    if (!in_bounds(nx, ny) || occupied(nx, ny)) continue;
    pos_[k] = {nx, ny};
    if (grid_[index(nx, ny)] == Cell::apple) {
      grid_[index(nx, ny)] = Cell::empty;
      t.extrinsic[k] += 1.0;
      ++events_.apples_consumed;
    }
  }

  // beams, lowest agent id first; rays pass over agents and stop at walls
  for (AgentId k = 0; k < config_.n_agents; ++k) {
    const Action a = joint[k];
    if (a != kClean && a != kPunish) continue;
    if (a == kClean) ++events_.clean_beams_fired;
    if (a == kPunish) {
      t.extrinsic[k] -= 1.0;
      ++events_.punish_beams_fired;
    }
    const int f = facing_[k];
    for (int i = 1; i <= kBeamLength; ++i) {
      const int cx = pos_[k].first + kDx[f] * i;
      const int cy = pos_[k].second + kDy[f] * i;
      if (!in_bounds(cx, cy)) break;
      if (a == kClean && grid_[index(cx, cy)] == Cell::waste) {
        grid_[index(cx, cy)] = Cell::river;
        ++events_.waste_cleaned;
      }
      if (a == kPunish) {
        for (AgentId j = 0; j < config_.n_agents; ++j) {
          if (j != k && pos_[j].first == cx && pos_[j].second == cy) {
            t.extrinsic[j] -= 50.0;
            ++events_.punish_hits;
          }
        }
      }
    }
  }

  // one waste cell may appear per step
  if (rng_.bernoulli(config_.waste_spawn_prob)) {
    std::vector<int> clean;
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      if (river_mask_[i] && grid_[i] == Cell::river) {
        clean.push_back(static_cast<int>(i));
      }
    }
    if (!clean.empty()) {
      grid_[clean[rng_.uniform_int(static_cast<int>(clean.size()))]] =
          Cell::waste;
      ++events_.waste_spawned;
    }
  }

  // apples sprout in empty, unoccupied orchard cells
  const double p = spawn_probability(waste_fraction());
  if (p > 0.0) {
    for (int y = 0; y < config_.height; ++y) {
      for (int x = 0; x < config_.width; ++x) {
        const int i = index(x, y);
        if (river_mask_[i] || grid_[i] != Cell::empty || occupied(x, y)) {
          continue;
        }
        if (rng_.bernoulli(p)) {
          grid_[i] = Cell::apple;
          ++events_.apples_spawned;
        }
      }
    }
  }

  ++step_index_;
  done_ = step_index_ >= config_.horizon;
  prev_joint_ = joint;
  t.next_obs = observe_all();
  t.done = done_;
  return t;
}

Observation CleanupEnv::observe(AgentId k) const {
  Observation o;
  o.window = config_.window;
  o.channels = kGridChannels;
  o.cells.resize(static_cast<std::size_t>(config_.window) * config_.window);
  const int half = config_.window / 2;
  std::size_t c = 0;
  for (int dy = -half; dy <= half; ++dy) {
    for (int dx = -half; dx <= half; ++dx, ++c) {
      const int x = pos_[k].first + dx;
      const int y = pos_[k].second + dy;
      Cell value = Cell::outside;
      if (in_bounds(x, y)) {
        value = occupied(x, y) ? Cell::agent : grid_[index(x, y)];
      }
      o.cells[c] = static_cast<std::uint8_t>(value);
    }
  }
  o.prev_joint_action = prev_joint_;
  o.step_index = step_index_;
  return o;
}

std::vector<Observation> CleanupEnv::observe_all() const {
  std::vector<Observation> out;
  out.reserve(config_.n_agents);
  for (AgentId k = 0; k < config_.n_agents; ++k) out.push_back(observe(k));
  return out;
}

}  // namespace marlab
