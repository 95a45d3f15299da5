/*
 * This file is part of misobo, a library for multi-information source
 * Bayesian optimization.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#ifndef MISOBO_ASCENT_HPP_
#define MISOBO_ASCENT_HPP_

#include <Eigen/Dense>

#include <functional>

#include "misobo/common.hpp"

namespace misobo {

struct AscentOptions {
  int max_iterations = 100;
  /// Central-difference step per dimension, as a fraction of the box width.
  double fd_step_frac = 1e-5;
  /// Converged when the step falls below this fraction of the box width.
  double convergence_frac = 1e-6;
};

struct AscentResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

using Objective = std::function<double(const Eigen::VectorXd&)>;

/// Central finite-difference gradient with per-dimension steps
/// fd_step_frac * width, evaluated with the perturbed points clamped to the
/// box (one-sided at the boundary).
Eigen::VectorXd fd_gradient(const Objective& f, const Box& box, const Eigen::VectorXd& x,
                            double fd_step_frac);

/// Maximizes f over the box from `start` by projected BFGS ascent with
/// finite-difference gradients and backtracking line search.
AscentResult maximize_in_box(const Objective& f, const Box& box, const Eigen::VectorXd& start,
                             const AscentOptions& options = {});

}  // namespace misobo

#endif  // MISOBO_ASCENT_HPP_
