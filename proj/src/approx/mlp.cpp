#include "marlab/approx/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace marlab::approx {

namespace {

MatrixXd he_uniform(int rows, int cols, RngStream& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(cols));
  MatrixXd w(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) {
      w(i, j) = rng.uniform(-limit, limit);
    }
  }
  return w;
}

}  // namespace

Mlp::Mlp(const std::vector<int>& sizes, RngStream& rng, Output output_kind)
    : output(output_kind) {
  if (sizes.size() < 2) {
    throw std::invalid_argument("Mlp needs at least input and output sizes");
  }
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    W.push_back(he_uniform(sizes[l + 1], sizes[l], rng));
    b.push_back(VectorXd::Zero(sizes[l + 1]));
  }
}

void Mlp::check_input(Eigen::Index rows) const {
  if (W.empty()) throw std::logic_error("Mlp is empty");
  if (rows != W.front().cols()) {
    throw std::invalid_argument("Mlp input size mismatch");
  }
}

VectorXd Mlp::value(const VectorXd& x) const {
  return value(MatrixXd(x)).col(0);
}

MatrixXd Mlp::value(const MatrixXd& X) const {
  check_input(X.rows());
  MatrixXd h = X;
  const int L = layer_count();
  for (int l = 0; l < L; ++l) {
    MatrixXd z = (W[l] * h).colwise() + b[l];
    if (l + 1 < L || output == Output::relu) {
      h = z.cwiseMax(0.0);
    } else {
      h = std::move(z);
    }
  }
  return h;
}

MatrixXd Mlp::forward(const MatrixXd& X, Cache& cache) const {
  check_input(X.rows());
  cache.input = X;
  cache.activations.clear();
  cache.activations.reserve(W.size());
  const int L = layer_count();
  MatrixXd h = X;
  for (int l = 0; l < L; ++l) {
    MatrixXd z = (W[l] * h).colwise() + b[l];
    if (l + 1 < L || output == Output::relu) {
      h = z.cwiseMax(0.0);
    } else {
      h = std::move(z);
    }
    cache.activations.push_back(h);
  }
  return h;
}

MatrixXd Mlp::backward(const Cache& cache, const MatrixXd& dY,
                       Grads& grads) const {
  if (cache.activations.size() != W.size()) {
    throw std::logic_error("Mlp::backward without a recorded forward pass");
  }
  const int L = layer_count();
  if (dY.rows() != W.back().rows() || dY.cols() != cache.input.cols()) {
    throw std::invalid_argument("Mlp::backward gradient shape mismatch");
  }
  MatrixXd delta = dY;
  for (int l = L - 1; l >= 0; --l) {
    if (l + 1 < L || output == Output::relu) {
      // ReLU was applied to this layer's output.
      delta = delta.cwiseProduct(
          (cache.activations[l].array() > 0.0).cast<double>().matrix());
    }
    const MatrixXd& below =
        (l == 0) ? cache.input : cache.activations[l - 1];
    grads.dW[l].noalias() += delta * below.transpose();
    grads.db[l] += delta.rowwise().sum();
    delta = W[l].transpose() * delta;
  }
  return delta;  // gradient wrt the input
}

Mlp::Grads Mlp::zero_grads() const {
  Grads g;
  for (std::size_t l = 0; l < W.size(); ++l) {
    g.dW.emplace_back(MatrixXd::Zero(W[l].rows(), W[l].cols()));
    g.db.emplace_back(VectorXd::Zero(b[l].size()));
  }
  return g;
}

void Mlp::Grads::set_zero() {
  for (auto& m : dW) m.setZero();
  for (auto& v : db) v.setZero();
}

Mlp::Grads& Mlp::Grads::operator+=(const Grads& other) {
  for (std::size_t l = 0; l < dW.size(); ++l) {
    dW[l] += other.dW[l];
    db[l] += other.db[l];
  }
  return *this;
}

Mlp::Grads& Mlp::Grads::operator*=(double s) {
  for (auto& m : dW) m *= s;
  for (auto& v : db) v *= s;
  return *this;
}

bool Mlp::finite() const {
  for (const auto& m : W) {
    if (!m.allFinite()) return false;
  }
  for (const auto& v : b) {
    if (!v.allFinite()) return false;
  }
  return true;
}

}  // namespace marlab::approx
