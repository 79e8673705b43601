#include "marlab/gridworlds/harvest.hpp"

#include <algorithm>

namespace marlab {

namespace {

constexpr int kDx[4] = {0, 0, -1, 1};
constexpr int kDy[4] = {-1, 1, 0, 0};

}  // namespace

HarvestEnv::HarvestEnv(const HarvestConfig& config) : config_(config) {
  build_default_map();
}

HarvestEnv::HarvestEnv(const HarvestConfig& config,
                       const std::vector<std::string>& map)
    : config_(config) {
  apply_map(map);
}

void HarvestEnv::build_default_map() {
  const int w = config_.width, h = config_.height;
  grid_.assign(static_cast<std::size_t>(w) * h, Cell::empty);
  orchard_mask_.assign(grid_.size(), false);
  // two square apple patches, left and right of centre
  auto patch = [&](int x0, int y0, int size) {
    for (int y = y0; y < y0 + size && y < h; ++y) {
      for (int x = x0; x < x0 + size && x < w; ++x) {
        grid_[index(x, y)] = Cell::apple;
        orchard_mask_[index(x, y)] = true;
      }
    }
  };
  const int size = std::max(2, std::min(4, h - 4));
  const int y0 = std::max(1, (h - size) / 2 + 1);
  patch(2, y0, size);
  patch(std::max(3, w - 2 - size), y0, size);
  start_pos_.clear();
  for (int k = 0; k < config_.n_agents; ++k) {
    int x = (k + 1) * w / (config_.n_agents + 1);
    start_pos_.emplace_back(std::min(x, w - 1), 0);
  }
  initial_grid_ = grid_;
}

void HarvestEnv::apply_map(const std::vector<std::string>& map) {
  config_.height = static_cast<int>(map.size());
  config_.width = static_cast<int>(map.at(0).size());
  grid_.assign(static_cast<std::size_t>(config_.width) * config_.height,
               Cell::empty);
  orchard_mask_.assign(grid_.size(), false);
  start_pos_.assign(config_.n_agents, {-1, -1});
  for (int y = 0; y < config_.height; ++y) {
    if (static_cast<int>(map[y].size()) != config_.width) {
      throw EnvContractError("harvest map rows must have equal width");
    }
    for (int x = 0; x < config_.width; ++x) {
      const char c = map[y][x];
      const int i = index(x, y);
      switch (c) {
        case 'A': grid_[i] = Cell::apple; orchard_mask_[i] = true; break;
        case 'a': orchard_mask_[i] = true; break;
        case '.': break;
        default:
          if (c >= '0' && c <= '9') {
            const int k = c - '0';
            if (k >= config_.n_agents) {
              throw EnvContractError("harvest map agent id out of range");
            }
            start_pos_[k] = {x, y};
          } else {
            throw EnvContractError("harvest map has unknown character");
          }
      }
    }
  }
  for (const auto& p : start_pos_) {
    if (p.first < 0) {
      throw EnvContractError("harvest map missing an agent start");
    }
  }
  initial_grid_ = grid_;
}

std::vector<Observation> HarvestEnv::reset(std::uint64_t seed) {
  rng_ = RngStream(seed);
  grid_ = initial_grid_;
  pos_ = start_pos_;
  facing_.assign(config_.n_agents, kDown);
  prev_joint_.assign(config_.n_agents, kStay);
  step_index_ = 0;
  done_ = false;
  ready_ = true;
  events_ = StepEvents{};
  return observe_all();
}

bool HarvestEnv::occupied(int x, int y) const {
  for (AgentId k = 0; k < config_.n_agents; ++k) {
    if (pos_[k].first == x && pos_[k].second == y) return true;
  }
  return false;
}

int HarvestEnv::apple_neighbours(int x, int y) const {
  int n = 0;
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      if (dx == 0 && dy == 0) continue;
      const int cx = x + dx, cy = y + dy;
      if (in_bounds(cx, cy) && grid_[index(cx, cy)] == Cell::apple) ++n;
    }
  }
  return n;
}

Transition HarvestEnv::step(const JointAction& joint) {
  if (!ready_) throw EnvContractError("harvest: step before reset");
  if (done_) throw EnvContractError("harvest: step on a finished episode");
  check_joint_action(joint, config_.n_agents, kActions);

  Transition t;
  t.obs = observe_all();
  t.joint_action = joint;
  t.extrinsic = VectorXd::Zero(config_.n_agents);
  events_ = StepEvents{};

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

  for (AgentId k = 0; k < config_.n_agents; ++k) {
    if (joint[k] != kPunish) continue;
    t.extrinsic[k] -= 1.0;
    ++events_.punish_beams_fired;
    const int f = facing_[k];
    for (int i = 1; i <= kBeamLength; ++i) {
      const int cx = pos_[k].first + kDx[f] * i;
      const int cy = pos_[k].second + kDy[f] * i;
      if (!in_bounds(cx, cy)) break;
      for (AgentId j = 0; j < config_.n_agents; ++j) {
        if (j != k && pos_[j].first == cx && pos_[j].second == cy) {
          t.extrinsic[j] -= 50.0;
          ++events_.punish_hits;
        }
      }
    }
  }

  // regrowth from a snapshot of the post-consumption grid, so the order in
  // which cells are visited cannot matter
  std::vector<Cell> snapshot = grid_;
  auto snapshot_neighbours = [&](int x, int y) {
    int n = 0;
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        const int cx = x + dx, cy = y + dy;
        if (in_bounds(cx, cy) && snapshot[index(cx, cy)] == Cell::apple) ++n;
      }
    }
    return n;
  };
  for (int y = 0; y < config_.height; ++y) {
    for (int x = 0; x < config_.width; ++x) {
      const int i = index(x, y);
      if (!orchard_mask_[i] || snapshot[i] != Cell::empty || occupied(x, y)) {
        continue;
      }
      const double p = config_.regrowth_prob[snapshot_neighbours(x, y)];
      if (p > 0.0 && rng_.bernoulli(p)) {
        grid_[i] = Cell::apple;
        ++events_.apples_spawned;
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

int HarvestEnv::apple_count() const {
  return static_cast<int>(
      std::count(grid_.begin(), grid_.end(), Cell::apple));
}

Observation HarvestEnv::observe(AgentId k) const {
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

std::vector<Observation> HarvestEnv::observe_all() const {
  std::vector<Observation> out;
  out.reserve(config_.n_agents);
  for (AgentId k = 0; k < config_.n_agents; ++k) out.push_back(observe(k));
  return out;
}

}  // namespace marlab
