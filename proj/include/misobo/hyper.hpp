/*
 * This file is part of misobo, a library for multi-information source
 * Bayesian optimization.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#ifndef MISOBO_HYPER_HPP_
#define MISOBO_HYPER_HPP_

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <vector>

#include "misobo/common.hpp"
#include "misobo/kernel.hpp"

namespace misobo {

/// Normal prior on a single natural-scale hyperparameter; the variance is
/// always (mean/2)^2 by construction.
struct NormalPrior {
  double mean = 1.0;
  double variance = 0.25;
};

/// Priors for one kernel block: d length scales plus a signal variance.
struct BlockPrior {
  std::vector<NormalPrior> length_scales;
  NormalPrior signal_variance;
};

/// One block for the truth kernel and one per biased source.
struct HyperPrior {
  BlockPrior truth;
  std::vector<BlockPrior> discrepancy;
};

/// Initial data with every source evaluated at the identical design set,
/// which makes per-source difference "observations" well defined.
class DifferenceDataset {
 public:
  /// `values[l][i]` is the observation of source l at design[i];
  /// `noise[l][i]` its observation-noise variance.
  DifferenceDataset(std::vector<Eigen::VectorXd> design, std::vector<Eigen::VectorXd> values,
                    std::vector<Eigen::VectorXd> noise);

  int num_points() const { return static_cast<int>(design_.size()); }
  int num_sources_total() const { return static_cast<int>(values_.size()); }  // M + 1
  const std::vector<Eigen::VectorXd>& design() const { return design_; }
  const Eigen::VectorXd& values(int source) const { return values_[static_cast<std::size_t>(source)]; }
  const Eigen::VectorXd& noise(int source) const { return noise_[static_cast<std::size_t>(source)]; }

  /// Difference observations IS_l - IS_0 for a biased source l >= 1.
  Eigen::VectorXd delta(int source) const;
  /// Noise variance of the difference observations: lambda_l + lambda_0.
  Eigen::VectorXd delta_noise(int source) const;

 private:
  std::vector<Eigen::VectorXd> design_;
  std::vector<Eigen::VectorXd> values_;
  std::vector<Eigen::VectorXd> noise_;
};

/// Prior construction from initial data:
///  - every length-scale prior mean is the length of the box interval it is
///    optimized over;
///  - the truth signal-variance prior mean is the sample variance of the
///    truth observations minus their average observational noise;
///  - each discrepancy signal-variance prior mean is the sample variance of
///    the difference observations minus the mean noise at that source and at
///    the truth source;
///  - nonpositive subtractions are floored at 1e-6, and every prior gets
///    variance (mean/2)^2.
HyperPrior build_priors(const DifferenceDataset& data, const Box& box);

struct FitOptions {
  bool use_priors = true;  // false = plain maximum likelihood
  int restarts = 8;
  int max_iterations = 100;
  std::uint64_t seed = 0;
  double jitter = 1e-6;
  /// Log-space search half-width around the prior mean, in natural-log units.
  double log_search_halfwidth = 4.60517018598809;  // ln(100)
};

struct FittedModel {
  MisoKernel kernel;
  MeanFunction mean;
  bool converged = true;
  HyperPrior priors;
};

/// MAP (or ML) fit of all kernel blocks. Blocks are independent: the truth
/// kernel is fitted to the truth-source observations with the mean constant
/// set to their average, and each discrepancy kernel to the difference
/// observations of its source with zero mean. Each block runs a seeded
/// multistart bounded ascent in log-hyperparameter space; the prior density
/// is evaluated at the natural-scale values.
FittedModel fit_map(const DifferenceDataset& data, const HyperPrior& priors, KernelFamily family,
                    const FitOptions& options = {});

/// Fit of a single kernel block by the same multistart ascent fit_map uses;
/// exposed for refit schedules where only the truth block has fresh data.
BaseKernel fit_single_block(const std::vector<Eigen::VectorXd>& design,
                            const Eigen::VectorXd& values, const Eigen::VectorXd& noise,
                            double mean_constant, KernelFamily family, const BlockPrior& prior,
                            const FitOptions& options = {}, std::uint64_t salt = 0);

/// Log marginal likelihood of a zero/constant-mean GP block (exposed for
/// tests and diagnostics).
double block_log_marginal_likelihood(const BaseKernel& kernel,
                                     const std::vector<Eigen::VectorXd>& design,
                                     const Eigen::VectorXd& values, const Eigen::VectorXd& noise,
                                     double mean_constant, double jitter);

/// Constant cost/noise estimation from replicated queries at a fixed design:
/// the estimated noise variance of a source is its per-point sample variance
/// pooled over the design, and the estimated cost is the average of the
/// per-query costs. `query(source, x, replicate)` performs a fresh draw.
struct EstimatedCostNoise {
  std::vector<double> cost;
  std::vector<double> noise;
};
EstimatedCostNoise estimate_constant_cost_noise(
    const std::function<double(int, const Eigen::VectorXd&, int)>& query,
    const std::function<double(int, const Eigen::VectorXd&)>& cost_of, int num_sources_total,
    const std::vector<Eigen::VectorXd>& design, int replicates);

}  // namespace misobo

#endif  // MISOBO_HYPER_HPP_
