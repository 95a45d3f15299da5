/*
 * This file is part of misobo, a library for multi-information source
 * Bayesian optimization.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#ifndef MISOBO_GP_HPP_
#define MISOBO_GP_HPP_

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "misobo/common.hpp"
#include "misobo/kernel.hpp"

namespace misobo {

/// One observed value of an information source.
struct Observation {
  int source = 0;
  Eigen::VectorXd x;
  double y = 0.0;
  double noise_var = 0.0;

  Observation() = default;
  Observation(int source_index, Eigen::VectorXd design, double value, double noise_variance)
      : source(source_index), x(std::move(design)), y(value), noise_var(noise_variance) {}

  AugmentedPoint point() const { return AugmentedPoint(source, x); }
};

/// Exact Gaussian-process posterior over the augmented space, maintained
/// through a lower-triangular Cholesky factor of the noisy Gram matrix.
///
/// States are immutable: update() returns a new state whose factor extends
/// the current one by a single row, and which agrees with a from-scratch
/// rebuild on the appended observation list. Queries are pure and safe to
/// call concurrently.
class PosteriorState {
 public:
  /// `jitter` is added to Gram diagonal entries whose supplied noise is
  /// exactly zero; pass 0 to disable (e.g. for exact-interpolation tests).
  PosteriorState(MisoKernel kernel, MeanFunction mean, std::vector<Observation> observations = {},
                 double jitter = 1e-6);

  int num_observations() const { return static_cast<int>(obs_.size()); }
  const std::vector<Observation>& observations() const { return obs_; }
  const MisoKernel& kernel() const { return kernel_; }
  const MeanFunction& mean_function() const { return mean_; }
  double jitter() const { return jitter_; }

  double posterior_mean(const AugmentedPoint& p) const;
  double posterior_cov(const AugmentedPoint& p, const AugmentedPoint& q) const;
  /// Posterior variance, clamped to zero when round-off drives it slightly
  /// negative.
  double posterior_var(const AugmentedPoint& p) const;

  /// New state with `obs` appended, via rank-one extension of the factor.
  /// Throws ConditioningError naming the observation if the extended system
  /// is no longer positive definite.
  PosteriorState update(const Observation& obs) const;

  /// One-step standard-deviation vector: entry i is
  ///   Cov_n[f(target_i), f(candidate)] / sqrt(noise + Var_n[f(candidate)]).
  /// After observing the candidate with the given noise variance, the
  /// posterior mean at target i moves to mean_i + sigma_tilde_i * Z for a
  /// single standard normal Z shared across targets.
  Eigen::VectorXd sigma_tilde(const AugmentedPoint& candidate, double candidate_noise_var,
                              std::span<const AugmentedPoint> targets) const;

  /// Lower factor L with L L^T = gram + noise (+ jitter where noise = 0).
  const Eigen::MatrixXd& chol_lower() const { return chol_; }
  /// Solved vector (gram + noise)^{-1} (y - mean).
  const Eigen::VectorXd& alpha() const { return alpha_; }

  /// k(X, p) against the training inputs; empty when no observations.
  Eigen::VectorXd prior_cross(const AugmentedPoint& p) const;
  /// Forward solve L^{-1} B for a matrix of right-hand sides.
  Eigen::MatrixXd solve_lower(const Eigen::MatrixXd& rhs) const;

 private:
  void factorize();

  MisoKernel kernel_;
  MeanFunction mean_;
  std::vector<Observation> obs_;
  double jitter_;
  Eigen::MatrixXd chol_;   // n x n lower triangular
  Eigen::VectorXd alpha_;  // (K + Lambda)^{-1} (y - mean)
  Eigen::VectorXd resid_;  // y - mean
};

/// Precomputed one-step quantities for a fixed target list, for evaluating
/// sigma_tilde against many candidates without re-solving per call.
class OneStepLookahead {
 public:
  OneStepLookahead(const PosteriorState& state, std::vector<AugmentedPoint> targets);

  const std::vector<AugmentedPoint>& targets() const { return targets_; }
  /// Posterior means at the targets under the current state.
  const Eigen::VectorXd& target_means() const { return means_; }

  Eigen::VectorXd sigma_tilde(const AugmentedPoint& candidate, double candidate_noise_var) const;

 private:
  const PosteriorState* state_;
  std::vector<AugmentedPoint> targets_;
  Eigen::MatrixXd solved_;  // L^{-1} k(X, targets)
  Eigen::VectorXd means_;
};

}  // namespace misobo

#endif  // MISOBO_GP_HPP_
