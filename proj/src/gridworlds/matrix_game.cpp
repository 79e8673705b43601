#include "marlab/gridworlds/matrix_game.hpp"

#include <stdexcept>

namespace marlab {

void MatrixGameSpec::validate() const {
  const int m = n_actions;
  if (m < 2) throw std::invalid_argument("matrix game: n_actions must be >= 2");
  if (payoff1.rows() != m || payoff1.cols() != m || payoff2.rows() != m ||
      payoff2.cols() != m) {
    throw std::invalid_argument("matrix game: payoff tables must be m x m");
  }
  if (static_cast<int>(successor.size()) != m) {
    throw std::invalid_argument("matrix game: successor table must be m x m");
  }
  for (const auto& row : successor) {
    if (static_cast<int>(row.size()) != m) {
      throw std::invalid_argument("matrix game: successor table must be m x m");
    }
    for (const auto& v : row) {
      if (v.size() != start.size()) {
        throw std::invalid_argument(
            "matrix game: successor features must match start features");
      }
    }
  }
}

MatrixGameSpec MatrixGameSpec::random(int n_actions, int feature_dim,
                                      RngStream& rng) {
  MatrixGameSpec spec;
  spec.n_actions = n_actions;
  spec.start = VectorXd::Zero(feature_dim);
  for (int f = 0; f < feature_dim; ++f) spec.start[f] = rng.uniform(-1, 1);
  spec.payoff1.resize(n_actions, n_actions);
  spec.payoff2.resize(n_actions, n_actions);
  spec.successor.resize(n_actions);
  for (int a = 0; a < n_actions; ++a) {
    spec.successor[a].resize(n_actions);
    for (int b = 0; b < n_actions; ++b) {
      spec.payoff1(a, b) = rng.uniform(-1, 1);
      spec.payoff2(a, b) = rng.uniform(-1, 1);
      VectorXd s(feature_dim);
      for (int f = 0; f < feature_dim; ++f) s[f] = rng.uniform(-1, 1);
      spec.successor[a][b] = s;
    }
  }
  return spec;
}

MatrixGameEnv::MatrixGameEnv(MatrixGameSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
}

Observation MatrixGameEnv::make_obs(const VectorXd& features,
                                    const JointAction& prev,
                                    int step_index) const {
  Observation o;
  o.dense = features;
  o.prev_joint_action = prev;
  o.step_index = step_index;
  return o;
}

std::vector<Observation> MatrixGameEnv::reset(std::uint64_t /*seed*/) {
  done_ = false;
  ready_ = true;
  const JointAction none(2, 0);
  return {make_obs(spec_.start, none, 0), make_obs(spec_.start, none, 0)};
}

Transition MatrixGameEnv::step(const JointAction& joint) {
  if (!ready_) throw EnvContractError("matrix game: step before reset");
  if (done_) throw EnvContractError("matrix game: step on a finished episode");
  check_joint_action(joint, 2, spec_.n_actions);
  Transition t;
  const JointAction none(2, 0);
  t.obs = {make_obs(spec_.start, none, 0), make_obs(spec_.start, none, 0)};
  t.joint_action = joint;
  t.extrinsic = VectorXd(2);
  t.extrinsic << spec_.payoff1(joint[0], joint[1]),
      spec_.payoff2(joint[0], joint[1]);
  const VectorXd& next = spec_.successor[joint[0]][joint[1]];
  t.next_obs = {make_obs(next, joint, 1), make_obs(next, joint, 1)};
  t.done = true;
  done_ = true;
  return t;
}

MatrixXd matrix_game_oracle_intentions(const MatrixGameSpec& spec,
                                       const JointAction& joint,
                                       const IntentionRule& rule) {
  spec.validate();
  check_joint_action(joint, 2, spec.n_actions);
  const int m = spec.n_actions;
  MatrixXd d = MatrixXd::Ones(2, 2);
  for (AgentId k = 0; k < 2; ++k) {
    const AgentId j = 1 - k;
    const VectorXd& reference =
        rule.reference_previous ? spec.start : spec.successor[joint[0]][joint[1]];
    auto loss_for = [&](const JointAction& variant) {
      const VectorXd& prediction = spec.successor[variant[0]][variant[1]];
      return 0.5 * (reference - prediction).squaredNorm();
    };
    const double actual = loss_for(joint);
    double denom = rule.inclusive_denominator ? actual : 0.0;
    for (Action b = 0; b < m; ++b) {
      if (b == joint[j]) continue;
      JointAction variant = joint;
      variant[j] = b;
      denom = std::max(denom, loss_for(variant));
    }
    d(k, j) = denom == 0.0 ? 1.0 : actual / denom;
  }
  return d;
}

}  // namespace marlab
