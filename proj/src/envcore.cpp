#include "marlab/envcore.hpp"

namespace marlab {

VectorXd Observation::features(int n_actions) const {
  const int grid_dim = grid_feature_dim();
  const int n = static_cast<int>(prev_joint_action.size());
  VectorXd out = VectorXd::Zero(grid_dim + n * n_actions);
  if (cells.empty()) {
    out.head(grid_dim) = dense;
  } else {
    for (int c = 0; c < static_cast<int>(cells.size()); ++c) {
      out[c * channels + cells[c]] = 1.0;
    }
  }
  for (int k = 0; k < n; ++k) {
    out[grid_dim + k * n_actions + prev_joint_action[k]] = 1.0;
  }
  return out;
}

void check_joint_action(const JointAction& joint, int n_agents,
                        int n_actions) {
  if (static_cast<int>(joint.size()) != n_agents) {
    throw EnvContractError("joint action must list one action per agent");
  }
  for (Action a : joint) {
    if (a < 0 || a >= n_actions) {
      throw EnvContractError("action index out of range");
    }
  }
}

}  // namespace marlab
