#pragma once

#include <vector>

#include "marlab/envcore.hpp"

namespace marlab {

// Deterministic two-player one-step game given by explicit tables.  The
// successor table maps every joint action to a global feature vector, which
// makes exact counterfactual reasoning computable by enumeration; this is
// the brute-force oracle environment for intention computation.
struct MatrixGameSpec {
  int n_actions = 2;
  VectorXd start;                                // features of the start state
  MatrixXd payoff1, payoff2;                     // n_actions x n_actions
  std::vector<std::vector<VectorXd>> successor;  // [a1][a2] -> features

  void validate() const;
  static MatrixGameSpec random(int n_actions, int feature_dim, RngStream& rng);
};

class MatrixGameEnv final : public Env {
 public:
  explicit MatrixGameEnv(MatrixGameSpec spec);

  int n_agents() const override { return 2; }
  int n_actions() const override { return spec_.n_actions; }
  std::vector<Observation> reset(std::uint64_t seed) override;
  Transition step(const JointAction& joint) override;

  const MatrixGameSpec& spec() const { return spec_; }

 private:
  Observation make_obs(const VectorXd& features, const JointAction& prev,
                       int step_index) const;

  MatrixGameSpec spec_;
  bool done_ = true;
  bool ready_ = false;
};

// How the intention ratio is formed from counterfactual losses.
struct IntentionRule {
  // true: denominator includes the actual action's loss, so d is in [0, 1];
  // false: denominator runs over counterfactual actions only and d may
  // exceed 1.  A zero denominator yields d = 1 in both modes.
  bool inclusive_denominator = true;
  // true: losses compare predictions against the previous encoded state;
  // false: against the current one.
  bool reference_previous = true;
};

// Exact intentions for every ordered agent pair of a matrix game under a
// perfect forward model (the successor table itself) and the identity
// encoder.  Pure enumeration, independent of the learned pipeline.
MatrixXd matrix_game_oracle_intentions(const MatrixGameSpec& spec,
                                       const JointAction& joint,
                                       const IntentionRule& rule = {});

}  // namespace marlab
