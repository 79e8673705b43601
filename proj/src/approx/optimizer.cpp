#include "marlab/approx/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace marlab::approx {

void Optimizer::step(const std::vector<TensorRef>& params,
                     const std::vector<TensorRef>& grads) {
  if (params.size() != grads.size()) {
    throw std::invalid_argument("optimizer: params/grads count mismatch");
  }
  if (m_.empty()) {
    m_.resize(params.size());
    v_.resize(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_[i] = VectorXd::Zero(params[i].size);
      v_[i] = VectorXd::Zero(params[i].size);
    }
  }
  if (m_.size() != params.size()) {
    throw std::invalid_argument("optimizer: tensor list changed size");
  }
  ++step_count_;
  const double lr = config_.learning_rate;
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].size != grads[i].size || m_[i].size() != params[i].size) {
      throw std::invalid_argument("optimizer: tensor shape mismatch");
    }
    Eigen::Map<VectorXd> p(params[i].data, params[i].size);
    Eigen::Map<const VectorXd> g(grads[i].data, grads[i].size);
    if (!g.allFinite()) {
      throw std::domain_error("optimizer: non-finite gradient");
    }
    switch (config_.method) {
      case OptimizerConfig::Method::sgd:
        p -= lr * g;
        break;
      case OptimizerConfig::Method::adam: {
        m_[i] = config_.beta1 * m_[i] + (1.0 - config_.beta1) * g;
        v_[i] = config_.beta2 * v_[i] +
                (1.0 - config_.beta2) * g.array().square().matrix();
        const double bc1 =
            1.0 - std::pow(config_.beta1, static_cast<double>(step_count_));
        const double bc2 =
            1.0 - std::pow(config_.beta2, static_cast<double>(step_count_));
        p.array() -= lr * (m_[i].array() / bc1) /
                     ((v_[i].array() / bc2).sqrt() + config_.epsilon);
        break;
      }
    }
  }
}

}  // namespace marlab::approx
