#include "marlab/approx/lstm.hpp"

#include <cmath>
#include <stdexcept>

namespace marlab::approx {

namespace {

VectorXd sigmoid(const VectorXd& z) {
  return (1.0 / (1.0 + (-z.array()).exp())).matrix();
}

}  // namespace

LstmCell::LstmCell(int input_size, int hidden_size, RngStream& rng) {
  const int fan_in = input_size + hidden_size;
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
  auto fill = [&](MatrixXd& m, int rows, int cols) {
    m.resize(rows, cols);
    for (int j = 0; j < cols; ++j) {
      for (int i = 0; i < rows; ++i) {
        m(i, j) = rng.uniform(-limit, limit);
      }
    }
  };
  fill(Wx, 4 * hidden_size, input_size);
  fill(Wh, 4 * hidden_size, hidden_size);
  bias = VectorXd::Zero(4 * hidden_size);
}

LstmCell::State LstmCell::initial_state() const {
  return State{VectorXd::Zero(hidden_size()), VectorXd::Zero(hidden_size())};
}

LstmCell::State LstmCell::step(const VectorXd& x, const State& prev) const {
  Cache scratch;
  return step(x, prev, scratch);
}

LstmCell::State LstmCell::step(const VectorXd& x, const State& prev,
                               Cache& cache) const {
  if (x.size() != Wx.cols() || prev.h.size() != Wh.cols()) {
    throw std::invalid_argument("LstmCell input size mismatch");
  }
  const int H = hidden_size();
  VectorXd z = Wx * x + Wh * prev.h + bias;
  cache.x = x;
  cache.h_prev = prev.h;
  cache.c_prev = prev.c;
  cache.gate_i = sigmoid(z.segment(0, H));
  cache.gate_f = sigmoid(z.segment(H, H));
  cache.gate_g = z.segment(2 * H, H).array().tanh().matrix();
  cache.gate_o = sigmoid(z.segment(3 * H, H));
  cache.c = cache.gate_f.cwiseProduct(prev.c) +
            cache.gate_i.cwiseProduct(cache.gate_g);
  cache.tanh_c = cache.c.array().tanh().matrix();
  State next;
  next.c = cache.c;
  next.h = cache.gate_o.cwiseProduct(cache.tanh_c);
  return next;
}

void LstmCell::backward(const Cache& cache, const VectorXd& dh,
                        const VectorXd& dc_in, Grads& grads, VectorXd& dx,
                        VectorXd& dh_prev, VectorXd& dc_prev) const {
  const int H = hidden_size();
  VectorXd d_o = dh.cwiseProduct(cache.tanh_c);
  VectorXd dc = dc_in + dh.cwiseProduct(cache.gate_o)
                            .cwiseProduct((1.0 - cache.tanh_c.array().square())
                                              .matrix());
  VectorXd d_f = dc.cwiseProduct(cache.c_prev);
  VectorXd d_i = dc.cwiseProduct(cache.gate_g);
  VectorXd d_g = dc.cwiseProduct(cache.gate_i);

  VectorXd dz(4 * H);
  dz.segment(0, H) =
      d_i.cwiseProduct(cache.gate_i)
          .cwiseProduct((1.0 - cache.gate_i.array()).matrix());
  dz.segment(H, H) =
      d_f.cwiseProduct(cache.gate_f)
          .cwiseProduct((1.0 - cache.gate_f.array()).matrix());
  dz.segment(2 * H, H) =
      d_g.cwiseProduct((1.0 - cache.gate_g.array().square()).matrix());
  dz.segment(3 * H, H) =
      d_o.cwiseProduct(cache.gate_o)
          .cwiseProduct((1.0 - cache.gate_o.array()).matrix());

  grads.dWx.noalias() += dz * cache.x.transpose();
  grads.dWh.noalias() += dz * cache.h_prev.transpose();
  grads.dbias += dz;

  dx = Wx.transpose() * dz;
  dh_prev += Wh.transpose() * dz;
  dc_prev += dc.cwiseProduct(cache.gate_f);
}

LstmCell::Grads LstmCell::zero_grads() const {
  Grads g;
  g.dWx = MatrixXd::Zero(Wx.rows(), Wx.cols());
  g.dWh = MatrixXd::Zero(Wh.rows(), Wh.cols());
  g.dbias = VectorXd::Zero(bias.size());
  return g;
}

void LstmCell::Grads::set_zero() {
  dWx.setZero();
  dWh.setZero();
  dbias.setZero();
}

bool LstmCell::finite() const {
  return Wx.allFinite() && Wh.allFinite() && bias.allFinite();
}

}  // namespace marlab::approx
