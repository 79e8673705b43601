#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <vector>

#include "marlab/eicm.hpp"
#include "marlab/envcore.hpp"

namespace marlab {

enum class Method { baseline, ia, kindmarl };

// Reward-shaping parameters.  The mixing weights and the per-agent
// inequity coefficients are deliberately named apart: extrinsic_weight /
// intrinsic_weight scale the final mix, envy_coeff / guilt_coeff weigh the
// disadvantageous and advantageous comparisons.
struct ShapingParams {
  VectorXd envy_coeff;   // disadvantageous-inequity weight per agent
  VectorXd guilt_coeff;  // advantageous-inequity weight per agent
  double trace_decay = 0.95;  // lambda
  double discount = 0.99;     // gamma
  double extrinsic_weight = 1.0;
  double intrinsic_weight = 1.0;
  Method method = Method::kindmarl;

  static ShapingParams defaults(int n_agents) {
    ShapingParams p;
    p.envy_coeff = VectorXd::Zero(n_agents);
    p.guilt_coeff = VectorXd::Constant(n_agents, 0.05);
    return p;
  }

  void validate() const {
    if (trace_decay < 0.0 || trace_decay > 1.0) {
      throw std::invalid_argument("trace_decay must be in [0, 1]");
    }
    if (discount <= 0.0 || discount > 1.0) {
      throw std::invalid_argument("discount must be in (0, 1]");
    }
    if (envy_coeff.size() != guilt_coeff.size() || envy_coeff.size() < 2) {
      throw std::invalid_argument("coefficient vectors must cover >= 2 agents");
    }
  }
};

// Smoothed per-agent memory of extrinsic rewards:
//   w_t = discount * trace_decay * w_{t-1} + e_t, with w_0 = 0.
struct RewardTrace {
  VectorXd w;
  long t = 0;

  explicit RewardTrace(int n_agents = 0) : w(VectorXd::Zero(n_agents)) {}
  void reset() {
    w.setZero();
    t = 0;
  }
};

template <typename Derived>
void trace_update(RewardTrace& trace,
                  const Eigen::MatrixBase<Derived>& extrinsic, double discount,
                  double trace_decay) {
  trace.w = discount * trace_decay * trace.w + extrinsic;
  ++trace.t;
}

// Intention-weighted inequity-aversion intrinsic reward for agent k.  The
// diagonal entry of the intention row multiplies a zero gap, so it never
// contributes.
template <typename DerivedW, typename DerivedD>
double intrinsic_reward_terms(Eigen::Index k,
                              const Eigen::MatrixBase<DerivedW>& w,
                              const Eigen::MatrixBase<DerivedD>& intentions,
                              double envy_coeff, double guilt_coeff) {
  const Eigen::Index n = w.size();
  if (n < 2) throw std::invalid_argument("intrinsic reward needs >= 2 agents");
  const double own = w[k];
  const double envy_sum =
      (intentions.array() * (w.array() - own).max(0.0)).sum();
  const double guilt_sum =
      (intentions.array() * (own - w.array()).max(0.0)).sum();
  const double scale = static_cast<double>(n - 1);
  return -(envy_coeff / scale) * envy_sum - (guilt_coeff / scale) * guilt_sum;
}

inline double intrinsic_reward(AgentId k, const RewardTrace& trace,
                               const VectorXd& intentions,
                               const ShapingParams& params) {
  return intrinsic_reward_terms(k, trace.w, intentions, params.envy_coeff[k],
                                params.guilt_coeff[k]);
}

inline double mix_reward(double extrinsic, double intrinsic,
                         const ShapingParams& params) {
  return params.extrinsic_weight * extrinsic +
         params.intrinsic_weight * intrinsic;
}

struct ShapeDiagnostics {
  VectorXd extrinsic;
  VectorXd intrinsic;
  VectorXd mixed;
  MatrixXd intentions;  // row k is agent k's view of its fellows
};

// One shaping step: updates the trace, fetches intentions (learned for
// kindmarl once warmed up, all-ones otherwise), forms the intrinsic rewards
// and mixes.  `eicms[k]` may be null unless the method needs it live.
inline ShapeDiagnostics shape_step(const Transition& t, RewardTrace& trace,
                                   const std::vector<const EicmState*>& eicms,
                                   const ShapingParams& params,
                                   bool warmed_up) {
  const int n = t.n_agents();
  if (trace.w.size() != n) {
    throw std::invalid_argument("shape_step: trace size mismatch");
  }
  if (!t.next_obs.empty() && trace.t + 1 != t.next_obs[0].step_index) {
    throw std::invalid_argument("shape_step: step index mismatch");
  }
  trace_update(trace, t.extrinsic, params.discount, params.trace_decay);

  ShapeDiagnostics diag;
  diag.extrinsic = t.extrinsic;
  diag.intrinsic = VectorXd::Zero(n);
  diag.mixed = VectorXd::Zero(n);
  const bool live = params.method == Method::kindmarl && warmed_up;
  diag.intentions = MatrixXd::Ones(n, n);
  for (AgentId k = 0; k < n; ++k) {
    if (live) {
      if (eicms.at(k) == nullptr) {
        throw std::invalid_argument("shape_step: missing EICM for agent");
      }
      diag.intentions.row(k) = eicms[k]->intentions_row(t, k).transpose();
    }
    diag.intrinsic[k] =
        intrinsic_reward(k, trace, diag.intentions.row(k).transpose(), params);
    diag.mixed[k] = mix_reward(t.extrinsic[k], diag.intrinsic[k], params);
  }
  return diag;
}

inline ShapeDiagnostics shape_step(const Transition& t, RewardTrace& trace,
                                   const std::vector<const EicmState*>& eicms,
                                   const ShapingParams& params,
                                   long steps_completed, int warmup_steps) {
  return shape_step(t, trace, eicms, params, steps_completed >= warmup_steps);
}

}  // namespace marlab
