#include "marlab/agents.hpp"

#include <stdexcept>

#include "marlab/approx/serialize.hpp"

namespace marlab {

void ReplayBuffer::push(ReplayEntry entry) {
  if (capacity_ == 0) return;
  if (entries_.size() < capacity_) {
    entries_.push_back(std::move(entry));
  } else {
    entries_[next_] = std::move(entry);
  }
  next_ = (next_ + 1) % capacity_;
}

std::vector<const ReplayEntry*> ReplayBuffer::sample(int batch,
                                                     RngStream& rng) const {
  if (entries_.empty()) {
    throw std::logic_error("replay buffer: sample from empty buffer");
  }
  std::vector<const ReplayEntry*> out;
  out.reserve(batch);
  for (int i = 0; i < batch; ++i) {
    out.push_back(&entries_[rng.uniform_int(static_cast<int>(entries_.size()))]);
  }
  return out;
}

namespace {

std::vector<int> q_net_sizes(const DqnConfig& config) {
  std::vector<int> sizes = {config.input_dim};
  sizes.insert(sizes.end(), config.hidden.begin(), config.hidden.end());
  sizes.push_back(config.n_actions);
  return sizes;
}

Action argmax_lowest(const VectorXd& values) {
  Action best = 0;
  for (Action a = 1; a < values.size(); ++a) {
    if (values[a] > values[best]) best = a;
  }
  return best;
}

}  // namespace

DqnAgent::DqnAgent(const DqnConfig& config, std::uint64_t init_seed,
                   std::uint64_t action_seed)
    : config_(config),
      optimizer_(config.optimizer),
      replay_(config.buffer_capacity),
      action_rng_(action_seed) {
  if (config_.input_dim <= 0 || config_.n_actions < 2) {
    throw std::invalid_argument("DqnConfig: input_dim and n_actions required");
  }
  RngStream init(init_seed);
  online_ = approx::Mlp(q_net_sizes(config_), init);
  target_ = online_;
}

double DqnAgent::epsilon() const {
  const double frac =
      config_.epsilon_decay_steps <= 0
          ? 1.0
          : std::min(1.0, static_cast<double>(act_count_) /
                              static_cast<double>(config_.epsilon_decay_steps));
  return config_.epsilon_start +
         frac * (config_.epsilon_end - config_.epsilon_start);
}

Action DqnAgent::greedy(const VectorXd& features) const {
  return argmax_lowest(online_(features));
}

Action DqnAgent::act(const VectorXd& features, double epsilon) {
  ++act_count_;
  if (action_rng_.u01() < epsilon) {
    return action_rng_.uniform_int(config_.n_actions);
  }
  return greedy(features);
}

double DqnAgent::learn(std::span<const ReplayEntry* const> batch,
                       const FeatureFn& features) {
  if (batch.empty()) {
    throw std::invalid_argument("DqnAgent::learn: empty batch");
  }
  const int B = static_cast<int>(batch.size());
  MatrixXd X(config_.input_dim, B), Xn(config_.input_dim, B);
  for (int i = 0; i < B; ++i) {
    X.col(i) = features(batch[i]->obs);
    Xn.col(i) = features(batch[i]->next_obs);
  }

  approx::Mlp::Cache cache;
  const MatrixXd q = online_.forward(X, cache);
  if (!q.allFinite()) {
    throw std::domain_error("DqnAgent: non-finite Q-values");
  }
  const MatrixXd q_next = target_(Xn);

  MatrixXd dq = MatrixXd::Zero(q.rows(), q.cols());
  double loss = 0.0;
  for (int i = 0; i < B; ++i) {
    const double bootstrap =
        batch[i]->done ? 0.0 : config_.discount * q_next.col(i).maxCoeff();
    const double y = batch[i]->reward + bootstrap;
    const double delta = q(batch[i]->action, i) - y;
    loss += delta * delta;
    dq(batch[i]->action, i) = 2.0 * delta / B;
  }
  loss /= B;

  approx::Mlp::Grads grads = online_.zero_grads();
  online_.backward(cache, dq, grads);
  std::vector<approx::TensorRef> params, grad_refs;
  for (std::size_t l = 0; l < online_.W.size(); ++l) {
    params.push_back(approx::TensorRef::of(online_.W[l]));
    params.push_back(approx::TensorRef::of(online_.b[l]));
    grad_refs.push_back(approx::TensorRef::of(grads.dW[l]));
    grad_refs.push_back(approx::TensorRef::of(grads.db[l]));
  }
  optimizer_.step(params, grad_refs);
  if (!online_.finite()) {
    throw std::domain_error("DqnAgent: non-finite parameters after update");
  }

  ++learn_count_;
  if (config_.target_sync_interval > 0 &&
      learn_count_ % config_.target_sync_interval == 0) {
    sync_target();
  }
  return loss;
}

std::optional<double> DqnAgent::learn_from_replay(const FeatureFn& features) {
  if (replay_.size() < static_cast<std::size_t>(config_.batch_size)) {
    return std::nullopt;
  }
  const auto batch = replay_.sample(config_.batch_size, action_rng_);
  return learn(batch, features);
}

std::vector<approx::NamedTensor> DqnAgent::to_tensors(
    const std::string& prefix) const {
  std::vector<approx::NamedTensor> out;
  approx::append_tensors(out, prefix + "/online", online_);
  approx::append_tensors(out, prefix + "/target", target_);
  approx::append_tensors(out, prefix + "/adam", optimizer_);
  out.push_back(approx::NamedTensor::scalar(prefix + "/act_count",
                                            static_cast<double>(act_count_)));
  out.push_back(approx::NamedTensor::scalar(
      prefix + "/learn_count", static_cast<double>(learn_count_)));
  return out;
}

void DqnAgent::from_tensors(const std::vector<approx::NamedTensor>& tensors,
                            const std::string& prefix) {
  approx::read_tensors(tensors, prefix + "/online", online_);
  approx::read_tensors(tensors, prefix + "/target", target_);
  approx::read_tensors(tensors, prefix + "/adam", optimizer_);
  act_count_ = static_cast<long>(
      approx::find_tensor(tensors, prefix + "/act_count").as_scalar());
  learn_count_ = static_cast<long>(
      approx::find_tensor(tensors, prefix + "/learn_count").as_scalar());
}

}  // namespace marlab
