#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "marlab/rng.hpp"

namespace marlab {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Agents and actions are dense integer indices: agents in [0, N), actions in
// [0, m) with one action set shared by all agents of an environment.
using AgentId = int;
using Action = int;

// Element k is agent k's action.
using JointAction = std::vector<Action>;

// Thrown when an environment's step/reset contract is violated (stepping a
// finished episode, malformed joint action, ...).
class EnvContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A local view of the global state.  Gridworld environments fill `cells`
// with one category code per cell of a window*window crop centred on the
// agent; feature-vector environments (the matrix game, test fixtures) leave
// `cells` empty and put their features in `dense`.  The previous joint
// action is broadcast as part of every observation.
struct Observation {
  int window = 0;
  int channels = 0;
  std::vector<std::uint8_t> cells;  // row-major, size window*window
  VectorXd dense;                   // used when cells is empty
  JointAction prev_joint_action;
  int step_index = 0;

  int grid_feature_dim() const {
    return cells.empty() ? static_cast<int>(dense.size())
                         : window * window * channels;
  }

  int feature_dim(int n_actions) const {
    return grid_feature_dim() +
           static_cast<int>(prev_joint_action.size()) * n_actions;
  }

  // Flat encoder input: one-hot grid (or dense features) followed by the
  // one-hot previous joint action.
  VectorXd features(int n_actions) const;
};

// One environment step.  `obs` is the per-agent view before the step,
// `next_obs` after it; `extrinsic` holds e^k for every agent.
struct Transition {
  std::vector<Observation> obs;
  JointAction joint_action;
  VectorXd extrinsic;
  std::vector<Observation> next_obs;
  bool done = false;

  int n_agents() const { return static_cast<int>(obs.size()); }
};

// Partially observed Markov game contract.  Instances are single threaded
// and own their RNG; run several instances for parallelism.
class Env {
 public:
  virtual ~Env() = default;

  virtual int n_agents() const = 0;
  virtual int n_actions() const = 0;

  // Puts the environment into its seeded initial state.  The same seed
  // reproduces the initial state and every subsequent stochastic draw.
  virtual std::vector<Observation> reset(std::uint64_t seed) = 0;

  // Advances one step.  Throws EnvContractError if the episode is already
  // done or reset() has not been called.
  virtual Transition step(const JointAction& joint) = 0;
};

void check_joint_action(const JointAction& joint, int n_agents, int n_actions);

}  // namespace marlab
