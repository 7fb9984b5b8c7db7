#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "sekf/errors.hpp"
#include "sekf/rng.hpp"

namespace sekf {

using RowMajorMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Layer activations kept for a reverse pass. act[0] is the input batch,
/// act[i] the post-activation output of layer i-1 (columns are samples).
struct MlpCache {
  std::vector<Eigen::MatrixXd> act;
};

/// Dense feed-forward network: sigmoid hidden layers, identity output.
///
/// All parameters live in one flat vector, laid out per layer as the
/// row-major weight matrix (rows = output units) followed by the bias
/// vector. Views into that vector are handed out as Eigen maps, so filter
/// updates applied to the flat vector are immediately visible to the
/// forward pass.
class Mlp {
 public:
  using Input = Eigen::VectorXd;

  Mlp() = default;

  explicit Mlp(std::vector<int> layer_sizes)
      : sizes_(std::move(layer_sizes)) {
    validate_sizes(sizes_);
    build_offsets();
    params_ = Eigen::VectorXd::Zero(total_params_);
  }

  static int param_count(const std::vector<int>& sizes) {
    validate_sizes(sizes);
    int l = 0;
    for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
      l += sizes[i] * sizes[i + 1] + sizes[i + 1];
    }
    return l;
  }

  /// Xavier-normal weights (std = sqrt(2/(fan_in+fan_out))), zero biases.
  /// Deterministic in the seed.
  static Mlp xavier_init(const std::vector<int>& sizes, std::uint64_t seed) {
    Mlp net(sizes);
    RngStream rng(seed, "init");
    net.xavier_fill(rng);
    return net;
  }

  /// Re-draw weights in place (used by stateless retraining events).
  void xavier_fill(RngStream& rng) {
    for (int l = 0; l < depth(); ++l) {
      const double std = std::sqrt(2.0 / (sizes_[l] + sizes_[l + 1]));
      auto w = weight(l);
      for (Eigen::Index r = 0; r < w.rows(); ++r) {
        for (Eigen::Index c = 0; c < w.cols(); ++c) {
          w(r, c) = rng.gaussian(0.0, std);
        }
      }
      bias(l).setZero();
    }
  }

  int depth() const { return static_cast<int>(sizes_.size()) - 1; }
  int input_dim() const { return sizes_.front(); }
  int output_dim() const { return sizes_.back(); }
  int param_count() const { return total_params_; }
  const std::vector<int>& layer_sizes() const { return sizes_; }

  Eigen::VectorXd& params() { return params_; }
  const Eigen::VectorXd& params() const { return params_; }

  Eigen::Map<RowMajorMatrix> weight(int layer) {
    return {params_.data() + w_off_[layer], sizes_[layer + 1], sizes_[layer]};
  }
  Eigen::Map<const RowMajorMatrix> weight(int layer) const {
    return {params_.data() + w_off_[layer], sizes_[layer + 1], sizes_[layer]};
  }
  Eigen::Map<Eigen::VectorXd> bias(int layer) {
    return {params_.data() + b_off_[layer], sizes_[layer + 1]};
  }
  Eigen::Map<const Eigen::VectorXd> bias(int layer) const {
    return {params_.data() + b_off_[layer], sizes_[layer + 1]};
  }

  int weight_offset(int layer) const { return w_off_[layer]; }
  int bias_offset(int layer) const { return b_off_[layer]; }

  Eigen::VectorXd predict(const Eigen::VectorXd& x) const {
    return forward_batch(x);
  }

  /// Forward pass over a batch (columns are samples).
  Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& x) const {
    check_input_rows(x.rows());
    Eigen::MatrixXd a = x;
    for (int l = 0; l < depth(); ++l) {
      Eigen::MatrixXd z = (weight(l) * a).colwise() + bias(l);
      a = (l + 1 < depth()) ? sigmoid(z) : std::move(z);
    }
    return a;
  }

  MlpCache forward_cached(const Eigen::MatrixXd& x) const {
    check_input_rows(x.rows());
    MlpCache cache;
    cache.act.reserve(sizes_.size());
    cache.act.push_back(x);
    for (int l = 0; l < depth(); ++l) {
      Eigen::MatrixXd z = (weight(l) * cache.act.back()).colwise() + bias(l);
      cache.act.push_back((l + 1 < depth()) ? sigmoid(z) : std::move(z));
    }
    return cache;
  }

  /// Reverse pass: accumulates d(scalar loss)/d(params) for the batch given
  /// d(loss)/d(output). Optionally also returns d(loss)/d(input batch).
  Eigen::VectorXd backward(const MlpCache& cache, const Eigen::MatrixXd& d_out,
                           Eigen::MatrixXd* d_input = nullptr) const {
    if (d_out.rows() != output_dim() ||
        d_out.cols() != cache.act.front().cols()) {
      throw ShapeError("Mlp::backward: gradient shape mismatch");
    }
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(total_params_);
    Eigen::MatrixXd delta = d_out;
    for (int l = depth() - 1; l >= 0; --l) {
      const Eigen::MatrixXd& a_prev = cache.act[l];
      Eigen::Map<RowMajorMatrix> gw(grad.data() + w_off_[l], sizes_[l + 1],
                                    sizes_[l]);
      gw = delta * a_prev.transpose();
      grad.segment(b_off_[l], sizes_[l + 1]) = delta.rowwise().sum();
      if (l > 0) {
        // a_prev is a sigmoid output; sigma' = a (1 - a).
        delta = (weight(l).transpose() * delta).cwiseProduct(
            (a_prev.array() * (1.0 - a_prev.array())).matrix());
      } else if (d_input != nullptr) {
        *d_input = weight(0).transpose() * delta;
      }
    }
    return grad;
  }

  /// Jacobians of the output at a single input: d(out)/d(input) (n_out x
  /// n_in) and/or d(out)/d(params) (n_out x param_count).
  void output_jacobians(const Eigen::VectorXd& x, Eigen::MatrixXd* jac_input,
                        Eigen::MatrixXd* jac_params) const {
    MlpCache cache = forward_cached(x);
    const int n = output_dim();
    if (jac_params != nullptr) {
      jac_params->setZero(n, total_params_);
    }
    // g = d(out)/d(pre-activation of layer l), initialized at the identity
    // output layer and pulled back one layer per iteration.
    Eigen::MatrixXd g = Eigen::MatrixXd::Identity(n, n);
    for (int l = depth() - 1; l >= 0; --l) {
      const Eigen::VectorXd& a_prev = cache.act[l].col(0);
      if (jac_params != nullptr) {
        for (int r = 0; r < sizes_[l + 1]; ++r) {
          jac_params->block(0, w_off_[l] + r * sizes_[l], n, sizes_[l]) =
              g.col(r) * a_prev.transpose();
        }
        jac_params->block(0, b_off_[l], n, sizes_[l + 1]) = g;
      }
      if (l > 0) {
        g = g * weight(l);
        g.array().rowwise() *=
            (a_prev.array() * (1.0 - a_prev.array())).transpose();
      } else if (jac_input != nullptr) {
        *jac_input = g * weight(0);
      }
    }
  }

  /// Parameter Jacobian H with H(i, j) = d(output_j)/d(param_i).
  Eigen::MatrixXd param_jacobian(const Eigen::VectorXd& x) const {
    Eigen::MatrixXd jp;
    output_jacobians(x, nullptr, &jp);
    return jp.transpose();
  }

  static Eigen::MatrixXd sigmoid(const Eigen::MatrixXd& z) {
    return (1.0 / (1.0 + (-z.array()).exp())).matrix();
  }

 private:
  static void validate_sizes(const std::vector<int>& sizes) {
    if (sizes.size() < 2) {
      throw ConfigError("Mlp: need at least input and output layer");
    }
    for (int s : sizes) {
      if (s < 1) throw ConfigError("Mlp: layer sizes must be positive");
    }
  }

  void check_input_rows(Eigen::Index rows) const {
    if (rows != input_dim()) {
      throw ShapeError("Mlp: input has " + std::to_string(rows) +
                       " rows, expected " + std::to_string(input_dim()));
    }
  }

  void build_offsets() {
    w_off_.resize(depth());
    b_off_.resize(depth());
    int off = 0;
    for (int l = 0; l < depth(); ++l) {
      w_off_[l] = off;
      off += sizes_[l] * sizes_[l + 1];
      b_off_[l] = off;
      off += sizes_[l + 1];
    }
    total_params_ = off;
  }

  std::vector<int> sizes_;
  std::vector<int> w_off_, b_off_;
  int total_params_ = 0;
  Eigen::VectorXd params_;
};

/// Gradient of the mean-squared error of a single prediction with respect to
/// the parameters: grad = -(2/n) H e for L = (1/n) sum_j e_j^2.
inline Eigen::VectorXd loss_gradient(const Eigen::MatrixXd& jac,
                                     const Eigen::VectorXd& innovation) {
  if (jac.cols() != innovation.size()) {
    throw ShapeError("loss_gradient: Jacobian/innovation mismatch");
  }
  const double n = static_cast<double>(innovation.size());
  return (-2.0 / n) * (jac * innovation);
}

}  // namespace sekf
