/*
 * This file is part of misobo, a library for multi-information source
 * Bayesian optimization.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#ifndef MISOBO_KERNEL_HPP_
#define MISOBO_KERNEL_HPP_

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

#include "misobo/common.hpp"

namespace misobo {

enum class KernelFamily { SquaredExponential, Matern52 };

std::string to_string(KernelFamily family);
KernelFamily kernel_family_from_string(const std::string& name);

/// Stationary covariance over designs with per-dimension length scales and
/// a signal variance. Hyperparameters are held in log space so positivity
/// is structural; constructors and accessors speak natural units.
class BaseKernel {
 public:
  /// Unit placeholder (1-d, unit length scale and signal variance).
  BaseKernel() : BaseKernel(KernelFamily::SquaredExponential, Eigen::VectorXd::Ones(1), 1.0) {}
  BaseKernel(KernelFamily family, const Eigen::VectorXd& length_scales, double signal_variance);

  /// Construct directly from log-space hyperparameters (used by fitting).
  static BaseKernel from_log(KernelFamily family, const Eigen::VectorXd& log_length_scales,
                             double log_signal_variance);

  double operator()(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;

  KernelFamily family() const { return family_; }
  int dim() const { return static_cast<int>(log_ls_.size()); }
  Eigen::VectorXd length_scales() const { return inv_ls_.cwiseInverse(); }
  double signal_variance() const { return sv_; }
  const Eigen::VectorXd& log_length_scales() const { return log_ls_; }
  double log_signal_variance() const { return log_sv_; }

 private:
  KernelFamily family_;
  Eigen::VectorXd log_ls_;
  double log_sv_;
  Eigen::VectorXd inv_ls_;  // cached exp(-log_ls)
  double sv_;               // cached exp(log_sv)
};

/// Composite covariance over the augmented space {0..M} x D.
///
/// Independent form:   K((l,x),(m,x')) = S0(x,x') + [l==m] a_l S_l(x,x')
/// Correlated form adds, for biased sources in the same group q = group(l),
/// a shared term S_group_q(x,x'). The truth source (index 0) never carries a
/// discrepancy or group term, so K((0,x),(0,x')) = S0(x,x') exactly and every
/// cross-source entry involving source 0 reduces to S0.
class MisoKernel {
 public:
  /// Placeholder with a unit truth kernel and no biased sources.
  MisoKernel() : MisoKernel(BaseKernel(), {}) {}
  /// `discrepancies` has one kernel per biased source (size M).
  /// `fidelity` are the per-source multipliers a_l (empty = all ones).
  /// `group_of` maps source index (0..M) to a group id in 0..Q-1 and must
  /// cover all sources when present; `group_kernels` has size Q.
  MisoKernel(BaseKernel truth, std::vector<BaseKernel> discrepancies,
             std::vector<double> fidelity = {}, std::vector<int> group_of = {},
             std::vector<BaseKernel> group_kernels = {});

  int num_sources() const { return static_cast<int>(discrepancy_.size()); }  // M
  int dim() const { return truth_.dim(); }
  bool correlated() const { return !group_of_.empty(); }

  double operator()(const AugmentedPoint& p, const AugmentedPoint& q) const;

  /// Gram matrix of `points` plus diag(noise). Entries with noise exactly 0
  /// receive `jitter` on the diagonal instead, which keeps factorizations of
  /// deterministic sources alive.
  Eigen::MatrixXd gram(std::span<const AugmentedPoint> points, std::span<const double> noise,
                       double jitter = 1e-6) const;

  const BaseKernel& truth_kernel() const { return truth_; }
  const BaseKernel& discrepancy_kernel(int source) const;  // source in 1..M
  const std::vector<BaseKernel>& discrepancy_kernels() const { return discrepancy_; }
  const std::vector<double>& fidelity() const { return fidelity_; }
  const std::vector<int>& group_of() const { return group_of_; }
  const std::vector<BaseKernel>& group_kernels() const { return group_kernels_; }

 private:
  BaseKernel truth_;
  std::vector<BaseKernel> discrepancy_;
  std::vector<double> fidelity_;
  std::vector<int> group_of_;
  std::vector<BaseKernel> group_kernels_;
};

/// Constant prior mean over the whole augmented space.
struct MeanFunction {
  double constant = 0.0;
  double operator()(const AugmentedPoint&) const { return constant; }
};

}  // namespace misobo

#endif  // MISOBO_KERNEL_HPP_
