#pragma once

#include <functional>
#include <string>
#include <vector>

#include "marlab/approx/checkpoint.hpp"
#include "marlab/approx/lstm.hpp"
#include "marlab/approx/mlp.hpp"
#include "marlab/approx/optimizer.hpp"
#include "marlab/envcore.hpp"

namespace marlab {

// Reference vector of the counterfactual prediction loss: the previous
// encoded state (the literal reading) or the current one (the curiosity
// convention).
enum class ImpactReference { previous, current };

struct EicmConfig {
  int obs_dim = 0;  // encoder input width (Observation::feature_dim)
  int n_agents = 2;
  int n_actions = 2;
  int q = 32;  // encoding width
  std::vector<int> encoder_hidden = {128, 128};
  int forward_hidden = 32;
  int inverse_hidden = 32;
  std::vector<int> moa_hidden = {32, 32};
  int context_dim = 128;
  double forward_weight = 0.5;
  double inverse_weight = 0.4;
  double moa_weight = 0.1;
  int warmup_steps = 1000;  // intentions forced to 1 for this many env steps
  bool eq4_literal = false;  // exclusive denominator for the intention ratio
  ImpactReference impact_reference = ImpactReference::previous;
  bool use_context = true;  // feed the recurrent state into the models
  approx::OptimizerConfig optimizer;
};

// Eq.-3-style losses for one ordered (observer, fellow) pair: the loss of
// the action the fellow actually took, plus one loss per counterfactual
// action (m-1 of them).
struct CounterfactualLossList {
  double actual_loss = 0.0;
  VectorXd alternative_losses;
};

struct EicmTrainReport {
  double forward_loss = 0.0;
  double inverse_loss = 0.0;
  double moa_loss = 0.0;
};

// The counterfactual machinery is written over callables so exact
// table-backed encoders/forward models can be slotted in by tests.
using EncodeFn = std::function<VectorXd(const Observation&)>;
using ForwardFn = std::function<VectorXd(
    const VectorXd& phi_prev, const VectorXd& context, const JointAction&)>;

CounterfactualLossList counterfactual_losses(
    const EncodeFn& encode, const ForwardFn& forward, const VectorXd& context,
    const Transition& t, AgentId observer, AgentId fellow, int n_actions,
    ImpactReference reference);

// d = actual / max(losses); in [0, 1] with the inclusive denominator.
// A zero denominator means no action had measurable impact and yields the
// neutral d = 1.
double intention_from_losses(const CounterfactualLossList& losses,
                             bool eq4_literal);

// Row `observer` of the intention matrix: d^{k,j} for every fellow j, with
// d^{k,k} = 1.
VectorXd intentions_row(const EncodeFn& encode, const ForwardFn& forward,
                        const VectorXd& context, const Transition& t,
                        AgentId observer, int n_actions,
                        ImpactReference reference, bool eq4_literal);

// Per-agent learned module: feature encoder phi, forward model, inverse
// model and a recurrent model of the other agents.  One instance per agent;
// intention computation is const, training is exclusive to the owner.
class EicmState {
 public:
  EicmState(const EicmConfig& config, RngStream& rng);

  const EicmConfig& config() const { return config_; }

  VectorXd encode(const Observation& obs) const;
  VectorXd forward_predict(const VectorXd& phi_prev, const VectorXd& context,
                           const JointAction& joint) const;

  // Recurrent context available when transition `t` is evaluated: the
  // stored state advanced through one model-of-others step (or zeros when
  // contexts are disabled).  Pure; does not move the stored state.
  VectorXd context_for(const Transition& t, AgentId self) const;

  CounterfactualLossList counterfactual_losses(const Transition& t,
                                               AgentId observer,
                                               AgentId fellow) const;
  double intention(const CounterfactualLossList& losses) const;
  VectorXd intentions_row(const Transition& t, AgentId observer) const;

  // Distributions over each fellow's action taken at the observed state,
  // conditioned on the observation and the joint action before it.
  // Advances the internal recurrent state.
  std::vector<VectorXd> moa_predict(const VectorXd& phi_prev,
                                    const JointAction& prev_joint);
  // Same distributions without touching the stored state.
  std::vector<VectorXd> moa_probabilities(const VectorXd& phi_prev,
                                          const JointAction& prev_joint) const;

  // One optimizer step on the weighted sum of forward, inverse and
  // model-of-others losses over an ordered batch of transitions.  The batch
  // is treated as a trajectory fragment: the recurrent state unrolls
  // through it (resetting after done transitions) and is committed at the
  // end.  Only the inverse loss trains the encoder.
  EicmTrainReport train(const std::vector<Transition>& batch, AgentId self);

  void reset_context();
  const VectorXd& context() const { return state_.h; }

  std::vector<approx::NamedTensor> to_tensors(const std::string& prefix) const;
  void from_tensors(const std::vector<approx::NamedTensor>& tensors,
                    const std::string& prefix);
  bool finite() const;

  approx::Mlp encoder, forward_model, inverse_model, moa_front, moa_head;
  approx::LstmCell moa_cell;

 private:
  VectorXd moa_cell_input(const VectorXd& front_out,
                          const JointAction& prev_joint) const;
  int fellow_block(AgentId self, AgentId fellow) const;

  EicmConfig config_;
  approx::LstmCell::State state_;
  approx::Optimizer optimizer_;
};

// One-hot encoding of a joint action, n_agents blocks of n_actions.
VectorXd one_hot_joint(const JointAction& joint, int n_actions);

}  // namespace marlab
