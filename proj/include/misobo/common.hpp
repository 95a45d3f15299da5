/*
 * This file is part of misobo, a library for multi-information source
 * Bayesian optimization.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#ifndef MISOBO_COMMON_HPP_
#define MISOBO_COMMON_HPP_

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <utility>

namespace misobo {

/// Thrown when a caller violates an operation's preconditions
/// (dimension mismatches, out-of-range source indices, bad settings).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a linear-algebra step fails for numerical reasons
/// (non-positive-definite system, degenerate predictive variance).
class ConditioningError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown on malformed configuration files or option values.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point of the augmented input space: an information-source index in
/// {0, ..., M} paired with a design vector. Source 0 is the unbiased
/// truth source by convention.
struct AugmentedPoint {
  int source = 0;
  Eigen::VectorXd x;

  AugmentedPoint() = default;
  AugmentedPoint(int source_index, Eigen::VectorXd design)
      : source(source_index), x(std::move(design)) {}
};

/// Axis-aligned box of feasible designs.
class Box {
 public:
  Box() = default;
  Box(Eigen::VectorXd lower, Eigen::VectorXd upper)
      : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (lower_.size() != upper_.size() || lower_.size() == 0) {
      throw InvalidInput("Box: bounds must be nonempty and of equal dimension");
    }
    for (Eigen::Index i = 0; i < lower_.size(); ++i) {
      if (!(lower_[i] < upper_[i])) {
        throw InvalidInput("Box: lower bound must be strictly below upper bound in every dimension");
      }
    }
  }

  /// Cube [lo, hi]^d.
  static Box cube(int dim, double lo, double hi) {
    return Box(Eigen::VectorXd::Constant(dim, lo), Eigen::VectorXd::Constant(dim, hi));
  }

  int dim() const { return static_cast<int>(lower_.size()); }
  const Eigen::VectorXd& lower() const { return lower_; }
  const Eigen::VectorXd& upper() const { return upper_; }
  double width(int i) const { return upper_[i] - lower_[i]; }
  double max_width() const { return (upper_ - lower_).maxCoeff(); }

  bool contains(const Eigen::VectorXd& x, double tol = 0.0) const {
    if (x.size() != lower_.size()) return false;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (x[i] < lower_[i] - tol || x[i] > upper_[i] + tol) return false;
    }
    return true;
  }

  Eigen::VectorXd clamp(Eigen::VectorXd x) const {
    return x.cwiseMax(lower_).cwiseMin(upper_);
  }

 private:
  Eigen::VectorXd lower_;
  Eigen::VectorXd upper_;
};

}  // namespace misobo

#endif  // MISOBO_COMMON_HPP_
