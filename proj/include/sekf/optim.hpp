#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "sekf/errors.hpp"

namespace sekf {

/// Adam optimizer state (first/second moments plus step counter).
struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  long step = 0;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  AdamState() = default;
  AdamState(int n_params, double learning_rate)
      : m(Eigen::VectorXd::Zero(n_params)),
        v(Eigen::VectorXd::Zero(n_params)),
        lr(learning_rate) {}
};

/// One bias-corrected Adam update applied in place. A non-finite gradient
/// raises without touching params or state.
inline void adam_step(AdamState& state, Eigen::VectorXd& params,
                      const Eigen::VectorXd& grad) {
  if (params.size() != grad.size() || params.size() != state.m.size()) {
    throw ShapeError("adam_step: size mismatch");
  }
  if (!grad.allFinite()) {
    throw NumericError("adam_step: non-finite gradient");
  }
  state.step += 1;
  state.m = state.beta1 * state.m + (1.0 - state.beta1) * grad;
  state.v = state.beta2 * state.v +
            (1.0 - state.beta2) * grad.cwiseProduct(grad);
  const double bc1 = 1.0 - std::pow(state.beta1, state.step);
  const double bc2 = 1.0 - std::pow(state.beta2, state.step);
  params.array() -= state.lr * (state.m.array() / bc1) /
                    ((state.v.array() / bc2).sqrt() + state.eps);
}

/// Learning-rate scheduler that multiplies by `factor` once the monitored
/// loss has gone `patience` consecutive epochs without improving.
struct PlateauScheduler {
  double factor = 0.3;
  int patience = 50;
  double best = std::numeric_limits<double>::infinity();
  int epochs_since_improvement = 0;

  PlateauScheduler() = default;
  PlateauScheduler(double scale, int patience_epochs)
      : factor(scale), patience(patience_epochs) {}

  /// Returns the (possibly reduced) learning rate for the next epoch.
  double update(double epoch_loss, double current_lr) {
    if (!std::isfinite(epoch_loss)) {
      throw NumericError("PlateauScheduler: non-finite loss");
    }
    if (epoch_loss < best) {
      best = epoch_loss;
      epochs_since_improvement = 0;
      return current_lr;
    }
    epochs_since_improvement += 1;
    if (epochs_since_improvement >= patience) {
      epochs_since_improvement = 0;
      return current_lr * factor;
    }
    return current_lr;
  }
};

}  // namespace sekf
