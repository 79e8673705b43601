#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "marlab/approx/checkpoint.hpp"
#include "marlab/approx/mlp.hpp"
#include "marlab/approx/optimizer.hpp"
#include "marlab/envcore.hpp"
#include "marlab/rng.hpp"

namespace marlab {

struct DqnConfig {
  int input_dim = 0;  // feature width fed to the Q-network
  int n_actions = 0;
  std::vector<int> hidden = {32, 32};
  std::size_t buffer_capacity = 50000;
  int batch_size = 64;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  long epsilon_decay_steps = 20000;
  int target_sync_interval = 500;  // in learn calls
  int learn_every = 4;             // in environment steps
  double discount = 0.99;
  approx::OptimizerConfig optimizer;
};

struct ReplayEntry {
  Observation obs;
  Action action = 0;
  double reward = 0.0;
  Observation next_obs;
  bool done = false;
};

// Fixed-capacity ring buffer with uniform sampling (with replacement).
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {}

  void push(ReplayEntry entry);
  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }
  const ReplayEntry& operator[](std::size_t i) const { return entries_[i]; }

  std::vector<const ReplayEntry*> sample(int batch, RngStream& rng) const;

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::vector<ReplayEntry> entries_;
};

// Maps a stored observation to the Q-network's input features; the harness
// plugs in the (frozen) EICM encoder here.
using FeatureFn = std::function<VectorXd(const Observation&)>;

// Deep Q-learning agent: online and target networks, replay buffer,
// epsilon-greedy action selection on mixed rewards.
class DqnAgent {
 public:
  DqnAgent(const DqnConfig& config, std::uint64_t init_seed,
           std::uint64_t action_seed);

  const DqnConfig& config() const { return config_; }

  // Epsilon-greedy over the online Q-values; ties go to the lowest action
  // index.  Advances the epsilon schedule.
  Action act(const VectorXd& features, double epsilon);
  Action greedy(const VectorXd& features) const;

  // Current position of the linear epsilon schedule.
  double epsilon() const;

  void remember(ReplayEntry entry) { replay_.push(std::move(entry)); }
  const ReplayBuffer& replay() const { return replay_; }

  // One optimizer step on the mean squared TD error with target
  // y = r + discount * (1 - done) * max_a Q_target(next).  Returns the
  // pre-step loss.  The target network refreshes automatically every
  // `target_sync_interval` learn calls.
  double learn(std::span<const ReplayEntry* const> batch,
               const FeatureFn& features);

  // Samples from the replay buffer; empty when the buffer is still short.
  std::optional<double> learn_from_replay(const FeatureFn& features);

  void sync_target() { target_ = online_; }

  long act_count() const { return act_count_; }
  long learn_count() const { return learn_count_; }

  const approx::Mlp& online() const { return online_; }
  const approx::Mlp& target() const { return target_; }
  approx::Mlp& online() { return online_; }  // test and checkpoint access

  std::vector<approx::NamedTensor> to_tensors(const std::string& prefix) const;
  void from_tensors(const std::vector<approx::NamedTensor>& tensors,
                    const std::string& prefix);

 private:
  DqnConfig config_;
  approx::Mlp online_, target_;
  approx::Optimizer optimizer_;
  ReplayBuffer replay_;
  RngStream action_rng_;
  long act_count_ = 0;
  long learn_count_ = 0;
};

}  // namespace marlab
