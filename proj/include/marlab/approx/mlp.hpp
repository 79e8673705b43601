#pragma once

#include <Eigen/Core>
#include <vector>

#include "marlab/rng.hpp"

namespace marlab::approx {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Fully connected network with ReLU hidden layers.  Batches are stored one
// sample per column so a forward pass over a batch is a plain matrix
// product.  Parameters are public, Eigen style; gradients live in a
// parallel Grads structure so evaluation stays const.
class Mlp {
 public:
  enum class Output { linear, relu };

  struct Cache {
    MatrixXd input;
    std::vector<MatrixXd> activations;  // post-activation, one per layer
  };

  struct Grads {
    std::vector<MatrixXd> dW;
    std::vector<VectorXd> db;

    void set_zero();
    Grads& operator+=(const Grads& other);
    Grads& operator*=(double s);
  };

  Mlp() = default;
  // sizes = {input, hidden..., output}
  Mlp(const std::vector<int>& sizes, RngStream& rng,
      Output output = Output::linear);

  int input_size() const { return W.empty() ? 0 : static_cast<int>(W.front().cols()); }
  int output_size() const { return W.empty() ? 0 : static_cast<int>(W.back().rows()); }
  int layer_count() const { return static_cast<int>(W.size()); }

  VectorXd value(const VectorXd& x) const;
  MatrixXd value(const MatrixXd& X) const;  // one sample per column

  // Expression-friendly entry point: vector expressions evaluate through
  // the single-sample path, everything else as a batch.
  template <typename Derived>
  auto operator()(const Eigen::MatrixBase<Derived>& x) const {
    if constexpr (Eigen::MatrixBase<Derived>::ColsAtCompileTime == 1) {
      return value(VectorXd(x));
    } else {
      return value(MatrixXd(x));
    }
  }

  // Records intermediate activations for backward().
  MatrixXd forward(const MatrixXd& X, Cache& cache) const;

  // Exact reverse-mode gradients of the recorded forward pass.  dY is the
  // loss gradient wrt the output; param gradients accumulate into `grads`
  // and the gradient wrt the input is returned.  Throws std::logic_error if
  // no forward pass was recorded.
  MatrixXd backward(const Cache& cache, const MatrixXd& dY,
                    Grads& grads) const;

  Grads zero_grads() const;
  bool finite() const;

  std::vector<MatrixXd> W;
  std::vector<VectorXd> b;
  Output output = Output::linear;

 private:
  void check_input(Eigen::Index rows) const;
};

}  // namespace marlab::approx
