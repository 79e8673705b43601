#include "marlab/eicm.hpp"

#include <cmath>
#include <stdexcept>

#include "marlab/approx/serialize.hpp"

namespace marlab {

namespace {

using approx::LstmCell;
using approx::Mlp;

// Cross-entropy of one softmax block; writes softmax - onehot into dlogits.
double softmax_cross_entropy(const Eigen::Ref<const VectorXd>& logits,
                             int target, Eigen::Ref<VectorXd> dlogits) {
  const double peak = logits.maxCoeff();
  VectorXd shifted = (logits.array() - peak).exp();
  const double sum = shifted.sum();
  dlogits = shifted / sum;
  const double loss = std::log(sum) - (logits[target] - peak);
  dlogits[target] -= 1.0;
  return loss;
}

VectorXd softmax(const Eigen::Ref<const VectorXd>& logits) {
  VectorXd shifted = (logits.array() - logits.maxCoeff()).exp();
  return shifted / shifted.sum();
}

VectorXd concat(std::initializer_list<const VectorXd*> parts) {
  Eigen::Index total = 0;
  for (const VectorXd* p : parts) total += p->size();
  VectorXd out(total);
  Eigen::Index at = 0;
  for (const VectorXd* p : parts) {
    out.segment(at, p->size()) = *p;
    at += p->size();
  }
  return out;
}

void collect_refs(Mlp& net, Mlp::Grads& grads,
                  std::vector<approx::TensorRef>& params,
                  std::vector<approx::TensorRef>& grad_refs) {
  for (std::size_t l = 0; l < net.W.size(); ++l) {
    params.push_back(approx::TensorRef::of(net.W[l]));
    params.push_back(approx::TensorRef::of(net.b[l]));
    grad_refs.push_back(approx::TensorRef::of(grads.dW[l]));
    grad_refs.push_back(approx::TensorRef::of(grads.db[l]));
  }
}

}  // namespace

VectorXd one_hot_joint(const JointAction& joint, int n_actions) {
  VectorXd out = VectorXd::Zero(static_cast<Eigen::Index>(joint.size()) *
                                n_actions);
  for (std::size_t k = 0; k < joint.size(); ++k) {
    out[static_cast<Eigen::Index>(k) * n_actions + joint[k]] = 1.0;
  }
  return out;
}

CounterfactualLossList counterfactual_losses(
    const EncodeFn& encode, const ForwardFn& forward, const VectorXd& context,
    const Transition& t, AgentId observer, AgentId fellow, int n_actions,
    ImpactReference reference) {
  if (fellow == observer) {
    throw std::invalid_argument("counterfactual fellow must differ from observer");
  }
  const VectorXd phi_prev = encode(t.obs[observer]);
  const VectorXd ref = reference == ImpactReference::previous
                           ? phi_prev
                           : encode(t.next_obs[observer]);
  auto loss_of = [&](const JointAction& joint) {
    const VectorXd prediction = forward(phi_prev, context, joint);
    return 0.5 * (ref - prediction).squaredNorm();
  };
  CounterfactualLossList out;
  out.actual_loss = loss_of(t.joint_action);
  out.alternative_losses.resize(n_actions - 1);
  Eigen::Index at = 0;
  for (Action b = 0; b < n_actions; ++b) {
    if (b == t.joint_action[fellow]) continue;
    JointAction counterfactual = t.joint_action;
    counterfactual[fellow] = b;
    out.alternative_losses[at++] = loss_of(counterfactual);
  }
  return out;
}

double intention_from_losses(const CounterfactualLossList& losses,
                             bool eq4_literal) {
  double denom = losses.alternative_losses.size() > 0
                     ? losses.alternative_losses.maxCoeff()
                     : 0.0;
  if (!eq4_literal) denom = std::max(denom, losses.actual_loss);
  return denom == 0.0 ? 1.0 : losses.actual_loss / denom;
}

VectorXd intentions_row(const EncodeFn& encode, const ForwardFn& forward,
                        const VectorXd& context, const Transition& t,
                        AgentId observer, int n_actions,
                        ImpactReference reference, bool eq4_literal) {
  const int n = t.n_agents();
  VectorXd row = VectorXd::Ones(n);
  for (AgentId j = 0; j < n; ++j) {
    if (j == observer) continue;
    row[j] = intention_from_losses(
        counterfactual_losses(encode, forward, context, t, observer, j,
                              n_actions, reference),
        eq4_literal);
  }
  return row;
}

EicmState::EicmState(const EicmConfig& config, RngStream& rng)
    : config_(config), optimizer_(config.optimizer) {
  if (config_.obs_dim <= 0) {
    throw std::invalid_argument("EicmConfig.obs_dim must be set");
  }
  const int n = config_.n_agents;
  const int m = config_.n_actions;

  std::vector<int> enc_sizes = {config_.obs_dim};
  enc_sizes.insert(enc_sizes.end(), config_.encoder_hidden.begin(),
                   config_.encoder_hidden.end());
  enc_sizes.push_back(config_.q);
  encoder = Mlp(enc_sizes, rng);

  forward_model = Mlp({config_.q + config_.context_dim + n * m,
                       config_.forward_hidden, config_.q},
                      rng);
  inverse_model = Mlp({2 * config_.q + config_.context_dim,
                       config_.inverse_hidden, n * m},
                      rng);

  std::vector<int> front_sizes = {config_.q};
  front_sizes.insert(front_sizes.end(), config_.moa_hidden.begin(),
                     config_.moa_hidden.end());
  moa_front = Mlp(front_sizes, rng, Mlp::Output::relu);
  moa_cell = LstmCell(config_.moa_hidden.back() + n * m, config_.context_dim,
                      rng);
  moa_head = Mlp({config_.context_dim, (n - 1) * m}, rng);

  state_ = moa_cell.initial_state();
}

VectorXd EicmState::encode(const Observation& obs) const {
  return encoder(obs.features(config_.n_actions));
}

VectorXd EicmState::forward_predict(const VectorXd& phi_prev,
                                    const VectorXd& context,
                                    const JointAction& joint) const {
  const VectorXd action = one_hot_joint(joint, config_.n_actions);
  return forward_model(concat({&phi_prev, &context, &action}));
}

VectorXd EicmState::moa_cell_input(const VectorXd& front_out,
                                   const JointAction& prev_joint) const {
  const VectorXd action = one_hot_joint(prev_joint, config_.n_actions);
  return concat({&front_out, &action});
}

VectorXd EicmState::context_for(const Transition& t, AgentId self) const {
  if (!config_.use_context) return VectorXd::Zero(config_.context_dim);
  const VectorXd phi_prev = encode(t.obs[self]);
  const VectorXd x =
      moa_cell_input(moa_front(phi_prev), t.obs[self].prev_joint_action);
  return moa_cell.step(x, state_).h;
}

CounterfactualLossList EicmState::counterfactual_losses(const Transition& t,
                                                        AgentId observer,
                                                        AgentId fellow) const {
  EncodeFn enc = [this](const Observation& o) { return encode(o); };
  ForwardFn fwd = [this](const VectorXd& phi, const VectorXd& u,
                         const JointAction& joint) {
    return forward_predict(phi, u, joint);
  };
  return marlab::counterfactual_losses(enc, fwd, context_for(t, observer), t,
                                       observer, fellow, config_.n_actions,
                                       config_.impact_reference);
}

double EicmState::intention(const CounterfactualLossList& losses) const {
  return intention_from_losses(losses, config_.eq4_literal);
}

VectorXd EicmState::intentions_row(const Transition& t,
                                   AgentId observer) const {
  EncodeFn enc = [this](const Observation& o) { return encode(o); };
  ForwardFn fwd = [this](const VectorXd& phi, const VectorXd& u,
                         const JointAction& joint) {
    return forward_predict(phi, u, joint);
  };
  return marlab::intentions_row(enc, fwd, context_for(t, observer), t,
                                observer, config_.n_actions,
                                config_.impact_reference, config_.eq4_literal);
}

int EicmState::fellow_block(AgentId self, AgentId fellow) const {
  return fellow < self ? fellow : fellow - 1;
}

std::vector<VectorXd> EicmState::moa_probabilities(
    const VectorXd& phi_prev, const JointAction& prev_joint) const {
  const VectorXd x = moa_cell_input(moa_front(phi_prev), prev_joint);
  const VectorXd logits = moa_head(moa_cell.step(x, state_).h);
  std::vector<VectorXd> out;
  const int m = config_.n_actions;
  for (int blockIndex = 0; blockIndex < config_.n_agents - 1; ++blockIndex) {
    out.push_back(softmax(logits.segment(blockIndex * m, m)));
  }
  return out;
}

std::vector<VectorXd> EicmState::moa_predict(const VectorXd& phi_prev,
                                             const JointAction& prev_joint) {
  const VectorXd x = moa_cell_input(moa_front(phi_prev), prev_joint);
  const LstmCell::State next = moa_cell.step(x, state_);
  const VectorXd logits = moa_head(next.h);
  std::vector<VectorXd> out;
  const int m = config_.n_actions;
  for (int blockIndex = 0; blockIndex < config_.n_agents - 1; ++blockIndex) {
    out.push_back(softmax(logits.segment(blockIndex * m, m)));
  }
  state_ = next;
  return out;
}

EicmTrainReport EicmState::train(const std::vector<Transition>& batch,
                                 AgentId self) {
  if (batch.empty()) {
    throw std::invalid_argument("EicmState::train: empty batch");
  }
  const int B = static_cast<int>(batch.size());
  const int n = config_.n_agents;
  const int m = config_.n_actions;
  const int q = config_.q;
  const int H = config_.context_dim;

  struct StepRecord {
    Mlp::Cache enc_prev, enc_cur, front, fwd, inv, head;
    LstmCell::Cache cell;
    VectorXd d_phi_hat, d_inv_logits, d_moa_logits;
    bool done = false;
  };
  std::vector<StepRecord> steps(batch.size());

  EicmTrainReport report;
  LstmCell::State running = state_;

  for (int i = 0; i < B; ++i) {
    const Transition& t = batch[i];
    StepRecord& rec = steps[i];
    rec.done = t.done;

    const VectorXd phi_prev =
        encoder.forward(t.obs[self].features(m), rec.enc_prev).col(0);
    const VectorXd phi_cur =
        encoder.forward(t.next_obs[self].features(m), rec.enc_cur).col(0);

    // model of others: predict the fellows' actions taken at obs
    const VectorXd front_out =
        moa_front.forward(phi_prev, rec.front).col(0);
    const VectorXd x =
        moa_cell_input(front_out, t.obs[self].prev_joint_action);
    const LstmCell::State next_state = moa_cell.step(x, running, rec.cell);
    const VectorXd moa_logits =
        moa_head.forward(next_state.h, rec.head).col(0);
    rec.d_moa_logits = VectorXd::Zero(moa_logits.size());
    double moa_loss = 0.0;
    for (AgentId j = 0; j < n; ++j) {
      if (j == self) continue;
      const int blockAt = fellow_block(self, j) * m;
      moa_loss += softmax_cross_entropy(
          moa_logits.segment(blockAt, m), t.joint_action[j],
          rec.d_moa_logits.segment(blockAt, m));
    }

    const VectorXd context =
        config_.use_context ? next_state.h : VectorXd::Zero(H);

    // forward model: phi and context are inputs, not trained through
    const VectorXd action_vec = one_hot_joint(t.joint_action, m);
    const VectorXd fwd_in = concat({&phi_prev, &context, &action_vec});
    const VectorXd phi_hat = forward_model.forward(fwd_in, rec.fwd).col(0);
    const VectorXd& ref = config_.impact_reference == ImpactReference::previous
                              ? phi_prev
                              : phi_cur;
    rec.d_phi_hat = phi_hat - ref;
    const double fwd_loss = 0.5 * rec.d_phi_hat.squaredNorm();

    // inverse model: the only path that trains the encoder
    const VectorXd inv_in = concat({&phi_prev, &phi_cur, &context});
    const VectorXd inv_logits =
        inverse_model.forward(inv_in, rec.inv).col(0);
    rec.d_inv_logits = VectorXd::Zero(inv_logits.size());
    double inv_loss = 0.0;
    for (AgentId k = 0; k < n; ++k) {
      inv_loss += softmax_cross_entropy(inv_logits.segment(k * m, m),
                                        t.joint_action[k],
                                        rec.d_inv_logits.segment(k * m, m));
    }

    report.forward_loss += fwd_loss;
    report.inverse_loss += inv_loss;
    report.moa_loss += moa_loss;

    running = t.done ? moa_cell.initial_state() : next_state;
  }

  report.forward_loss /= B;
  report.inverse_loss /= B;
  report.moa_loss /= B;

  // reverse pass
  Mlp::Grads enc_grads = encoder.zero_grads();
  Mlp::Grads fwd_grads = forward_model.zero_grads();
  Mlp::Grads inv_grads = inverse_model.zero_grads();
  Mlp::Grads front_grads = moa_front.zero_grads();
  Mlp::Grads head_grads = moa_head.zero_grads();
  LstmCell::Grads cell_grads = moa_cell.zero_grads();

  const double wf = config_.forward_weight / B;
  const double wi = config_.inverse_weight / B;
  const double wm = config_.moa_weight / B;

  VectorXd dh_carry = VectorXd::Zero(H);
  VectorXd dc_carry = VectorXd::Zero(H);
  for (int i = B - 1; i >= 0; --i) {
    StepRecord& rec = steps[i];

    VectorXd dh = moa_head
                      .backward(rec.head, wm * rec.d_moa_logits, head_grads)
                      .col(0);
    dh += dh_carry;
    VectorXd dc = dc_carry;
    VectorXd dx;
    dh_carry.setZero();
    dc_carry.setZero();
    moa_cell.backward(rec.cell, dh, dc, cell_grads, dx, dh_carry, dc_carry);
    if (i == 0 || steps[i - 1].done) {
      dh_carry.setZero();
      dc_carry.setZero();
    }
    // front slice of the cell input; the action slice is constant and the
    // encoder is not trained through the MOA path
    const Eigen::Index front_dim = moa_front.output_size();
    moa_front.backward(rec.front, dx.head(front_dim), front_grads);

    forward_model.backward(rec.fwd, wf * rec.d_phi_hat, fwd_grads);

    const VectorXd dinv_in =
        inverse_model.backward(rec.inv, wi * rec.d_inv_logits, inv_grads)
            .col(0);
    encoder.backward(rec.enc_prev, dinv_in.head(q), enc_grads);
    encoder.backward(rec.enc_cur, dinv_in.segment(q, q), enc_grads);
  }

  std::vector<approx::TensorRef> params, grads;
  collect_refs(encoder, enc_grads, params, grads);
  collect_refs(forward_model, fwd_grads, params, grads);
  collect_refs(inverse_model, inv_grads, params, grads);
  collect_refs(moa_front, front_grads, params, grads);
  collect_refs(moa_head, head_grads, params, grads);
  params.push_back(approx::TensorRef::of(moa_cell.Wx));
  params.push_back(approx::TensorRef::of(moa_cell.Wh));
  params.push_back(approx::TensorRef::of(moa_cell.bias));
  grads.push_back(approx::TensorRef::of(cell_grads.dWx));
  grads.push_back(approx::TensorRef::of(cell_grads.dWh));
  grads.push_back(approx::TensorRef::of(cell_grads.dbias));
  optimizer_.step(params, grads);

  state_ = running;
  return report;
}

void EicmState::reset_context() { state_ = moa_cell.initial_state(); }

std::vector<approx::NamedTensor> EicmState::to_tensors(
    const std::string& prefix) const {
  std::vector<approx::NamedTensor> out;
  approx::append_tensors(out, prefix + "/encoder", encoder);
  approx::append_tensors(out, prefix + "/forward", forward_model);
  approx::append_tensors(out, prefix + "/inverse", inverse_model);
  approx::append_tensors(out, prefix + "/moa_front", moa_front);
  approx::append_tensors(out, prefix + "/moa_cell", moa_cell);
  approx::append_tensors(out, prefix + "/moa_head", moa_head);
  approx::append_tensors(out, prefix + "/adam", optimizer_);
  return out;
}

void EicmState::from_tensors(const std::vector<approx::NamedTensor>& tensors,
                             const std::string& prefix) {
  approx::read_tensors(tensors, prefix + "/encoder", encoder);
  approx::read_tensors(tensors, prefix + "/forward", forward_model);
  approx::read_tensors(tensors, prefix + "/inverse", inverse_model);
  approx::read_tensors(tensors, prefix + "/moa_front", moa_front);
  approx::read_tensors(tensors, prefix + "/moa_cell", moa_cell);
  approx::read_tensors(tensors, prefix + "/moa_head", moa_head);
  approx::read_tensors(tensors, prefix + "/adam", optimizer_);
  state_ = moa_cell.initial_state();
}

bool EicmState::finite() const {
  return encoder.finite() && forward_model.finite() &&
         inverse_model.finite() && moa_front.finite() && moa_head.finite() &&
         moa_cell.finite() && state_.h.allFinite() && state_.c.allFinite();
}

}  // namespace marlab
