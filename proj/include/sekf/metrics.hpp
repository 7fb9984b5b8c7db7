#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <iostream>
#include <string>
#include <vector>

#include "sekf/errors.hpp"

namespace sekf {

/// Mean absolute deviation between two equal-length vectors.
inline double mae(const Eigen::VectorXd& pred, const Eigen::VectorXd& truth) {
  if (pred.size() != truth.size()) throw ShapeError("mae: length mismatch");
  if (pred.size() == 0) throw ConfigError("mae: empty input");
  return (pred - truth).cwiseAbs().mean();
}

/// Mean squared deviation between two equal-length vectors.
inline double mse(const Eigen::VectorXd& pred, const Eigen::VectorXd& truth) {
  if (pred.size() != truth.size()) throw ShapeError("mse: length mismatch");
  if (pred.size() == 0) throw ConfigError("mse: empty input");
  return (pred - truth).squaredNorm() / static_cast<double>(pred.size());
}

/// Forecast skill score: 1 = perfect, 0 = no gain over the unmaintained
/// model, negative = maintenance made things worse.
inline double fss(double loss_maintenance, double loss_no_maintenance) {
  if (loss_no_maintenance <= 0.0) {
    throw ConfigError("fss: no-maintenance loss must be positive");
  }
  return 1.0 - loss_maintenance / loss_no_maintenance;
}

/// Mean wall-clock time per streamed iteration, in seconds.
inline double mtpi(const std::vector<double>& iter_seconds) {
  if (iter_seconds.empty()) throw ConfigError("mtpi: empty input");
  double total = 0.0;
  for (double s : iter_seconds) total += s;
  return total / static_cast<double>(iter_seconds.size());
}

/// Per-channel z-score normalization fitted on training data.
///
/// Channels are columns. A constant channel gets std := 1 (with a warning)
/// so the transform stays invertible.
class Scaler {
 public:
  Scaler() = default;

  static Scaler fit(const Eigen::MatrixXd& train) {
    if (train.rows() < 2) throw ConfigError("Scaler: need >= 2 samples");
    Scaler s;
    s.mean_ = train.colwise().mean();
    Eigen::MatrixXd centered = train.rowwise() - s.mean_.transpose();
    // Population std, matching the usual train-time normalization.
    s.std_ = (centered.array().square().colwise().mean()).sqrt();
    for (Eigen::Index c = 0; c < s.std_.size(); ++c) {
      if (s.std_(c) <= 0.0) {
        std::cerr << "sekf: Scaler channel " << c
                  << " is constant; using std = 1\n";
        s.std_(c) = 1.0;
      }
    }
    return s;
  }

  Eigen::MatrixXd transform(const Eigen::MatrixXd& x) const {
    check(x.cols());
    return (x.rowwise() - mean_.transpose()).array().rowwise() /
           std_.transpose().array();
  }

  Eigen::MatrixXd inverse(const Eigen::MatrixXd& z) const {
    check(z.cols());
    return (z.array().rowwise() * std_.transpose().array()).matrix().rowwise() +
           mean_.transpose();
  }

  /// Transform a single sample given as a (channel-length) vector.
  Eigen::VectorXd transform_vec(const Eigen::VectorXd& x) const {
    check(x.size());
    return (x - mean_).cwiseQuotient(std_);
  }

  Eigen::VectorXd inverse_vec(const Eigen::VectorXd& z) const {
    check(z.size());
    return z.cwiseProduct(std_) + mean_;
  }

  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::VectorXd& stddev() const { return std_; }
  Eigen::Index channels() const { return mean_.size(); }

 private:
  void check(Eigen::Index n) const {
    if (n != mean_.size()) throw ShapeError("Scaler: channel count mismatch");
  }

  Eigen::VectorXd mean_;
  Eigen::VectorXd std_;
};

/// A metric aggregated over evaluation windows: mean plus a normal-
/// approximation 95% confidence half-width.
struct MetricRecord {
  std::string name;
  double mean = 0.0;
  double ci95 = 0.0;
  std::vector<double> values;
};

inline MetricRecord summarize(std::string name, std::vector<double> values) {
  if (values.size() < 2) throw ConfigError("summarize: need >= 2 windows");
  const double m = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= m;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sample_std = std::sqrt(ss / (m - 1.0));
  MetricRecord rec;
  rec.name = std::move(name);
  rec.mean = mean;
  rec.ci95 = 1.96 * sample_std / std::sqrt(m);
  rec.values = std::move(values);
  return rec;
}

}  // namespace sekf
