/*
 * This file is part of misobo, a library for multi-information source
 * Bayesian optimization.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#ifndef MISOBO_COST_HPP_
#define MISOBO_COST_HPP_

#include <Eigen/Dense>

#include <functional>
#include <vector>

#include "misobo/common.hpp"

namespace misobo {

/// Known query-cost and observation-noise functions, one pair per source.
/// Costs must be strictly positive over the domain; noise variances
/// nonnegative.
class CostNoiseModel {
 public:
  using Field = std::function<double(const Eigen::VectorXd&)>;

  CostNoiseModel() = default;
  CostNoiseModel(std::vector<Field> cost, std::vector<Field> noise)
      : cost_(std::move(cost)), noise_(std::move(noise)) {
    if (cost_.size() != noise_.size() || cost_.empty()) {
      throw InvalidInput("CostNoiseModel: need one cost and one noise function per source");
    }
  }

  /// Constant cost and noise per source (the common benchmark case).
  static CostNoiseModel constant(const std::vector<double>& costs,
                                 const std::vector<double>& noises);

  int num_sources_total() const { return static_cast<int>(cost_.size()); }  // M + 1

  double query_cost(int source, const Eigen::VectorXd& x) const {
    check(source);
    return cost_[static_cast<std::size_t>(source)](x);
  }

  double noise_var(int source, const Eigen::VectorXd& x) const {
    check(source);
    return noise_[static_cast<std::size_t>(source)](x);
  }

 private:
  void check(int source) const {
    if (source < 0 || source >= num_sources_total()) {
      throw InvalidInput("CostNoiseModel: source index out of range");
    }
  }

  std::vector<Field> cost_;
  std::vector<Field> noise_;
};

inline CostNoiseModel CostNoiseModel::constant(const std::vector<double>& costs,
                                               const std::vector<double>& noises) {
  if (costs.size() != noises.size()) {
    throw InvalidInput("CostNoiseModel: cost and noise lists must have equal length");
  }
  std::vector<Field> c, n;
  for (double v : costs) {
    if (!(v > 0.0)) throw InvalidInput("CostNoiseModel: costs must be strictly positive");
    c.push_back([v](const Eigen::VectorXd&) { return v; });
  }
  for (double v : noises) {
    if (v < 0.0) throw InvalidInput("CostNoiseModel: noise variances must be nonnegative");
    n.push_back([v](const Eigen::VectorXd&) { return v; });
  }
  return CostNoiseModel(std::move(c), std::move(n));
}

}  // namespace misobo

#endif  // MISOBO_COST_HPP_
