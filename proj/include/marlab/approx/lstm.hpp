#pragma once

#include <Eigen/Core>

#include "marlab/rng.hpp"

namespace marlab::approx {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Standard gated recurrent cell (LSTM).  Gate pre-activations are stacked
// as [input; forget; candidate; output] rows of Wx / Wh.
class LstmCell {
 public:
  struct State {
    VectorXd h, c;
  };

  struct Cache {
    VectorXd x, h_prev, c_prev;
    VectorXd gate_i, gate_f, gate_g, gate_o, c, tanh_c;
  };

  struct Grads {
    MatrixXd dWx, dWh;
    VectorXd dbias;

    void set_zero();
  };

  LstmCell() = default;
  LstmCell(int input_size, int hidden_size, RngStream& rng);

  int input_size() const { return static_cast<int>(Wx.cols()); }
  int hidden_size() const { return static_cast<int>(Wh.cols()); }

  State initial_state() const;

  State step(const VectorXd& x, const State& prev) const;
  State step(const VectorXd& x, const State& prev, Cache& cache) const;

  // One step of backpropagation through time.  dh/dc are gradients wrt this
  // step's outputs; gradients wrt the inputs come back through dx, dh_prev,
  // dc_prev (accumulated into the latter two so a BPTT loop can reuse them).
  void backward(const Cache& cache, const VectorXd& dh, const VectorXd& dc,
                Grads& grads, VectorXd& dx, VectorXd& dh_prev,
                VectorXd& dc_prev) const;

  Grads zero_grads() const;
  bool finite() const;

  MatrixXd Wx, Wh;  // (4*hidden) x input, (4*hidden) x hidden
  VectorXd bias;    // 4*hidden
};

}  // namespace marlab::approx
