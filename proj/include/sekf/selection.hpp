#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "sekf/errors.hpp"
#include "sekf/mlp.hpp"

namespace sekf {

/// Linear-interpolation quantile of an unsorted vector. With n values the
/// rank is h = q (n - 1) and the result interpolates between the two
/// bracketing order statistics.
inline double quantile(const Eigen::VectorXd& values, double q) {
  if (values.size() == 0) throw ConfigError("quantile: empty vector");
  if (q < 0.0 || q > 1.0) throw ConfigError("quantile: q outside [0, 1]");
  std::vector<double> sorted(values.data(), values.data() + values.size());
  std::sort(sorted.begin(), sorted.end());
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - std::floor(h);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

/// Indices with gradient magnitude strictly above the q-quantile of the
/// current gradient magnitudes. Selects a (roughly) fixed proportion.
inline std::vector<int> select_prop(const Eigen::VectorXd& grad_abs,
                                    double q) {
  const double threshold = quantile(grad_abs, q);
  std::vector<int> selected;
  for (Eigen::Index i = 0; i < grad_abs.size(); ++i) {
    if (grad_abs(i) > threshold) selected.push_back(static_cast<int>(i));
  }
  return selected;
}

/// Indices strictly above a fixed threshold; cardinality varies over time.
inline std::vector<int> select_mag(const Eigen::VectorXd& grad_abs,
                                   double threshold) {
  std::vector<int> selected;
  for (Eigen::Index i = 0; i < grad_abs.size(); ++i) {
    if (grad_abs(i) > threshold) selected.push_back(static_cast<int>(i));
  }
  return selected;
}

/// Which parameters a maintenance step may touch.
///
/// - All: every parameter.
/// - Prop(q): strictly above the q-quantile of the current |grad|.
/// - Mag(q): strictly above a threshold fitted once from the validation-set
///   |grad| at the trained parameters; must be fitted before use.
struct SelectionPolicy {
  enum class Kind { All, Prop, Mag };

  Kind kind = Kind::All;
  double q = 0.0;
  double mag_threshold = 0.0;
  bool threshold_fitted = false;

  static SelectionPolicy all() { return {}; }

  static SelectionPolicy prop(double q) {
    check_q(q);
    SelectionPolicy p;
    p.kind = Kind::Prop;
    p.q = q;
    return p;
  }

  static SelectionPolicy mag(double q) {
    check_q(q);
    SelectionPolicy p;
    p.kind = Kind::Mag;
    p.q = q;
    return p;
  }

  void set_mag_threshold(double threshold) {
    mag_threshold = threshold;
    threshold_fitted = true;
  }

  std::vector<int> select(const Eigen::VectorXd& grad_abs) const {
    switch (kind) {
      case Kind::All: {
        std::vector<int> all_idx(grad_abs.size());
        std::iota(all_idx.begin(), all_idx.end(), 0);
        return all_idx;
      }
      case Kind::Prop:
        return select_prop(grad_abs, q);
      case Kind::Mag:
        if (!threshold_fitted) {
          throw ConfigError("SelectionPolicy: Mag threshold not fitted");
        }
        return select_mag(grad_abs, mag_threshold);
    }
    return {};
  }

  std::string to_string() const {
    switch (kind) {
      case Kind::All:
        return "all";
      case Kind::Prop:
        return "prop:" + format_q(q);
      case Kind::Mag:
        return "mag:" + format_q(q);
    }
    return "all";
  }

 private:
  static void check_q(double q) {
    if (!(q > 0.0 && q < 1.0)) {
      throw ConfigError("SelectionPolicy: q must be in (0, 1)");
    }
  }

  static std::string format_q(double q) {
    std::string s = std::to_string(q);
    while (s.size() > 1 && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
  }
};

/// Parses "all", "prop:0.99" or "mag:0.95".
inline SelectionPolicy parse_selection(const std::string& spec) {
  if (spec == "all") return SelectionPolicy::all();
  const auto colon = spec.find(':');
  if (colon != std::string::npos) {
    const std::string kind = spec.substr(0, colon);
    double q = 0.0;
    try {
      q = std::stod(spec.substr(colon + 1));
    } catch (const std::exception&) {
      throw ConfigError("selection spec has a malformed quantile: " + spec);
    }
    if (kind == "prop") return SelectionPolicy::prop(q);
    if (kind == "mag") return SelectionPolicy::mag(q);
  }
  throw ConfigError("unknown selection spec: " + spec);
}

/// Threshold for Mag selection: the q-quantile of |grad| of the mean
/// squared validation loss evaluated at the trained parameters.
template <class Model>
double fit_mag_threshold(const Model& model,
                         const std::vector<typename Model::Input>& val_inputs,
                         const std::vector<Eigen::VectorXd>& val_targets,
                         double q) {
  if (val_inputs.empty() || val_inputs.size() != val_targets.size()) {
    throw ConfigError("fit_mag_threshold: empty or inconsistent validation set");
  }
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(model.param_count());
  for (std::size_t i = 0; i < val_inputs.size(); ++i) {
    const Eigen::VectorXd pred = model.predict(val_inputs[i]);
    const Eigen::VectorXd innovation = val_targets[i] - pred;
    grad += loss_gradient(model.param_jacobian(val_inputs[i]), innovation);
  }
  grad /= static_cast<double>(val_inputs.size());
  return quantile(grad.cwiseAbs(), q);
}

}  // namespace sekf
