#pragma once

#include <Eigen/Core>
#include <vector>

namespace marlab::approx {

using Eigen::VectorXd;

// Flat view over one parameter (or gradient) tensor, shape-erased.
struct TensorRef {
  double* data = nullptr;
  Eigen::Index size = 0;

  template <typename Derived>
  static TensorRef of(Eigen::PlainObjectBase<Derived>& t) {
    return TensorRef{t.data(), t.size()};
  }
};

struct OptimizerConfig {
  enum class Method { sgd, adam };
  Method method = Method::adam;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Applies SGD or Adam updates to a fixed list of tensors.  The caller must
// pass the same tensors in the same order on every step; moment buffers are
// allocated on first use and keyed by position.
class Optimizer {
 public:
  explicit Optimizer(OptimizerConfig config = {}) : config_(config) {}

  // params[i] is updated in place from grads[i].  Throws
  // std::invalid_argument on shape mismatch and std::domain_error if any
  // gradient is non-finite.
  void step(const std::vector<TensorRef>& params,
            const std::vector<TensorRef>& grads);

  long step_count() const { return step_count_; }
  const OptimizerConfig& config() const { return config_; }

  // Checkpoint access to the internal moments.
  std::vector<VectorXd>& first_moments() { return m_; }
  std::vector<VectorXd>& second_moments() { return v_; }
  const std::vector<VectorXd>& first_moments() const { return m_; }
  const std::vector<VectorXd>& second_moments() const { return v_; }
  void set_step_count(long t) { step_count_ = t; }

 private:
  OptimizerConfig config_;
  std::vector<VectorXd> m_, v_;
  long step_count_ = 0;
};

}  // namespace marlab::approx
