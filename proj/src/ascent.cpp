/*
 * This file is part of misobo, a library for multi-information source
 * Bayesian optimization.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#include "misobo/ascent.hpp"

#include <cmath>

namespace misobo {

Eigen::VectorXd fd_gradient(const Objective& f, const Box& box, const Eigen::VectorXd& x,
                            double fd_step_frac) {
  const int d = box.dim();
  Eigen::VectorXd grad(d);
  Eigen::VectorXd xp = x;
  for (int i = 0; i < d; ++i) {
    const double h = fd_step_frac * box.width(i);
    const double hi = std::min(x[i] + h, box.upper()[i]);
    const double lo = std::max(x[i] - h, box.lower()[i]);
    xp[i] = hi;
    const double fp = f(xp);
    xp[i] = lo;
    const double fm = f(xp);
    xp[i] = x[i];
    grad[i] = (hi > lo) ? (fp - fm) / (hi - lo) : 0.0;
  }
  return grad;
}

AscentResult maximize_in_box(const Objective& f, const Box& box, const Eigen::VectorXd& start,
                             const AscentOptions& options) {
  const int d = box.dim();
  if (start.size() != d) throw InvalidInput("maximize_in_box: start dimension mismatch");

  AscentResult result;
  result.x = box.clamp(start);
  result.value = f(result.x);

  Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(d, d);
  Eigen::VectorXd grad = fd_gradient(f, box, result.x, options.fd_step_frac);
  const double step_tol = options.convergence_frac * box.max_width();

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    result.iterations = iter + 1;
    if (!grad.allFinite()) break;

    Eigen::VectorXd direction = h_inv * grad;
    if (direction.dot(grad) <= 0.0) {
      direction = grad;  // curvature estimate went bad, fall back to steepest ascent
      h_inv.setIdentity();
    }
    const double dir_norm = direction.norm();
    if (dir_norm == 0.0) {
      result.converged = true;
      break;
    }
    // Scale the first trial step so it cannot exceed half the box.
    double alpha = 1.0;
    const double max_step = 0.5 * box.max_width();
    if (alpha * dir_norm > max_step) alpha = max_step / dir_norm;

    Eigen::VectorXd x_new;
    double value_new = result.value;
    bool improved = false;
    for (int back = 0; back < 30; ++back) {
      x_new = box.clamp(result.x + alpha * direction);
      value_new = f(x_new);
      const double predicted = grad.dot(x_new - result.x);
      if (value_new > result.value + 1e-4 * predicted && value_new > result.value) {
        improved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!improved) {
      result.converged = true;  // no ascent step left at this resolution
      break;
    }

    const Eigen::VectorXd step = x_new - result.x;
    Eigen::VectorXd grad_new = fd_gradient(f, box, x_new, options.fd_step_frac);
    // BFGS update on the inverse Hessian of -f (ascent convention).
    const Eigen::VectorXd y = grad - grad_new;
    const double sy = step.dot(y);
    if (sy > 1e-12 * step.norm() * y.norm()) {
      const Eigen::VectorXd hy = h_inv * y;
      const double yhy = y.dot(hy);
      h_inv += ((sy + yhy) / (sy * sy)) * (step * step.transpose()) -
               (hy * step.transpose() + step * hy.transpose()) / sy;
    }

    result.x = x_new;
    result.value = value_new;
    grad = grad_new;
    if (step.lpNorm<Eigen::Infinity>() < step_tol) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace misobo
