/*
 * This file is part of misobo, a library for multi-information source
 * Bayesian optimization.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#include "misobo/hyper.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <future>
#include <numbers>

#include "misobo/acquisition.hpp"
#include "misobo/ascent.hpp"
#include "misobo/rng.hpp"

namespace misobo {

DifferenceDataset::DifferenceDataset(std::vector<Eigen::VectorXd> design,
                                     std::vector<Eigen::VectorXd> values,
                                     std::vector<Eigen::VectorXd> noise)
    : design_(std::move(design)), values_(std::move(values)), noise_(std::move(noise)) {
  if (values_.empty() || values_.size() != noise_.size()) {
    throw InvalidInput("DifferenceDataset: need matching value and noise lists per source");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(design_.size());
  for (std::size_t l = 0; l < values_.size(); ++l) {
    if (values_[l].size() != n || noise_[l].size() != n) {
      throw InvalidInput("DifferenceDataset: every source must be evaluated at the shared design");
    }
  }
}

Eigen::VectorXd DifferenceDataset::delta(int source) const {
  if (source < 1 || source >= num_sources_total()) {
    throw InvalidInput("DifferenceDataset::delta: source must be a biased source index");
  }
  return values_[static_cast<std::size_t>(source)] - values_[0];
}

Eigen::VectorXd DifferenceDataset::delta_noise(int source) const {
  if (source < 1 || source >= num_sources_total()) {
    throw InvalidInput("DifferenceDataset::delta_noise: source must be a biased source index");
  }
  return noise_[static_cast<std::size_t>(source)] + noise_[0];
}

namespace {

constexpr double kSignalVarianceFloor = 1e-6;

double sample_variance(const Eigen::VectorXd& v) {
  const Eigen::Index n = v.size();
  const double mean = v.mean();
  return (v.array() - mean).square().sum() / static_cast<double>(n - 1);
}

NormalPrior prior_from_mean(double mean) {
  NormalPrior p;
  p.mean = mean;
  p.variance = 0.25 * mean * mean;
  return p;
}

BlockPrior block_prior(const Box& box, double signal_mean) {
  BlockPrior block;
  block.length_scales.reserve(static_cast<std::size_t>(box.dim()));
  for (int i = 0; i < box.dim(); ++i) {
    block.length_scales.push_back(prior_from_mean(box.width(i)));
  }
  block.signal_variance = prior_from_mean(signal_mean);
  return block;
}

}  // namespace

HyperPrior build_priors(const DifferenceDataset& data, const Box& box) {
  if (data.num_points() < 2) {
    throw InvalidInput("build_priors: at least two initial design points required");
  }
  HyperPrior priors;
  const double truth_signal =
      std::max(kSignalVarianceFloor, sample_variance(data.values(0)) - data.noise(0).mean());
  priors.truth = block_prior(box, truth_signal);
  for (int l = 1; l < data.num_sources_total(); ++l) {
    const double delta_signal = std::max(
        kSignalVarianceFloor,
        sample_variance(data.delta(l)) - data.noise(l).mean() - data.noise(0).mean());
    priors.discrepancy.push_back(block_prior(box, delta_signal));
  }
  return priors;
}

double block_log_marginal_likelihood(const BaseKernel& kernel,
                                     const std::vector<Eigen::VectorXd>& design,
                                     const Eigen::VectorXd& values, const Eigen::VectorXd& noise,
                                     double mean_constant, double jitter) {
  const Eigen::Index n = static_cast<Eigen::Index>(design.size());
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double v = kernel(design[static_cast<std::size_t>(i)], design[static_cast<std::size_t>(j)]);
      k(i, j) = v;
      k(j, i) = v;
    }
    k(i, i) += (noise[i] == 0.0) ? jitter : noise[i];
  }
  Eigen::LLT<Eigen::MatrixXd> llt(k);
  if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
  const Eigen::VectorXd resid = values.array() - mean_constant;
  const Eigen::VectorXd alpha = llt.solve(resid);
  const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  return -0.5 * resid.dot(alpha) - 0.5 * log_det -
         0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
}

namespace {

struct BlockFitResult {
  Eigen::VectorXd log_params;  // d length scales then signal variance
  bool converged = true;
};

double log_normal_density(double x, const NormalPrior& prior) {
  const double d = x - prior.mean;
  return -0.5 * d * d / prior.variance - 0.5 * std::log(2.0 * std::numbers::pi * prior.variance);
}

/// Fits one block by multistart bounded ascent in log space.
BlockFitResult fit_block(const std::vector<Eigen::VectorXd>& design, const Eigen::VectorXd& values,
                         const Eigen::VectorXd& noise, double mean_constant, KernelFamily family,
                         const BlockPrior& prior, const FitOptions& options, std::uint64_t salt) {
  const int d = static_cast<int>(design.front().size());
  Eigen::VectorXd center(d + 1);
  for (int i = 0; i < d; ++i) center[i] = std::log(prior.length_scales[static_cast<std::size_t>(i)].mean);
  center[d] = std::log(prior.signal_variance.mean);
  const Box log_box(center.array() - options.log_search_halfwidth,
                    center.array() + options.log_search_halfwidth);

  const Objective objective = [&](const Eigen::VectorXd& log_params) {
    const BaseKernel kernel = BaseKernel::from_log(family, log_params.head(d), log_params[d]);
    double value = block_log_marginal_likelihood(kernel, design, values, noise, mean_constant,
                                                 options.jitter);
    if (options.use_priors && std::isfinite(value)) {
      for (int i = 0; i < d; ++i) {
        value += log_normal_density(std::exp(log_params[i]),
                                    prior.length_scales[static_cast<std::size_t>(i)]);
      }
      value += log_normal_density(std::exp(log_params[d]), prior.signal_variance);
    }
    return value;
  };

  AscentOptions ascent;
  ascent.max_iterations = options.max_iterations;
  ascent.fd_step_frac = 1e-5;
  ascent.convergence_frac = 1e-7;

  std::vector<Eigen::VectorXd> starts;
  starts.push_back(center);  // prior mean is always one start
  if (options.restarts > 1) {
    const std::vector<Eigen::VectorXd> extra =
        latin_hypercube_points(options.restarts - 1, log_box, mix_seed(options.seed, 0xf17, salt));
    starts.insert(starts.end(), extra.begin(), extra.end());
  }

  BlockFitResult best;
  double best_value = -std::numeric_limits<double>::infinity();
  bool any_converged = false;
  for (const Eigen::VectorXd& start : starts) {
    const AscentResult run = maximize_in_box(objective, log_box, start, ascent);
    any_converged = any_converged || run.converged;
    if (run.value > best_value) {
      best_value = run.value;
      best.log_params = run.x;
    }
  }
  best.converged = any_converged && std::isfinite(best_value);
  return best;
}

}  // namespace

BaseKernel fit_single_block(const std::vector<Eigen::VectorXd>& design,
                            const Eigen::VectorXd& values, const Eigen::VectorXd& noise,
                            double mean_constant, KernelFamily family, const BlockPrior& prior,
                            const FitOptions& options, std::uint64_t salt) {
  if (design.size() < 2) throw InvalidInput("fit_single_block: at least two data points required");
  const BlockFitResult r =
      fit_block(design, values, noise, mean_constant, family, prior, options, salt);
  const int d = static_cast<int>(design.front().size());
  return BaseKernel::from_log(family, r.log_params.head(d), r.log_params[d]);
}

FittedModel fit_map(const DifferenceDataset& data, const HyperPrior& priors, KernelFamily family,
                    const FitOptions& options) {
  if (data.num_points() < 2) throw InvalidInput("fit_map: at least two initial design points required");
  const int m = data.num_sources_total() - 1;
  if (static_cast<int>(priors.discrepancy.size()) != m) {
    throw InvalidInput("fit_map: prior must contain one discrepancy block per biased source");
  }
  const double mean_constant = data.values(0).mean();

  // Block fits are independent; run them concurrently and join in order.
  std::vector<std::future<BlockFitResult>> jobs;
  jobs.push_back(std::async(std::launch::async, [&] {
    return fit_block(data.design(), data.values(0), data.noise(0), mean_constant, family,
                     priors.truth, options, 0);
  }));
  for (int l = 1; l <= m; ++l) {
    jobs.push_back(std::async(std::launch::async, [&, l] {
      return fit_block(data.design(), data.delta(l), data.delta_noise(l), 0.0, family,
                       priors.discrepancy[static_cast<std::size_t>(l - 1)], options,
                       static_cast<std::uint64_t>(l));
    }));
  }

  const int d = static_cast<int>(data.design().front().size());
  std::vector<BlockFitResult> results;
  results.reserve(jobs.size());
  for (auto& job : jobs) results.push_back(job.get());

  BaseKernel truth = BaseKernel::from_log(family, results[0].log_params.head(d),
                                          results[0].log_params[d]);
  std::vector<BaseKernel> discrepancies;
  bool converged = results[0].converged;
  for (int l = 1; l <= m; ++l) {
    const BlockFitResult& r = results[static_cast<std::size_t>(l)];
    discrepancies.push_back(BaseKernel::from_log(family, r.log_params.head(d), r.log_params[d]));
    converged = converged && r.converged;
  }
  FittedModel model{MisoKernel(std::move(truth), std::move(discrepancies)),
                    MeanFunction{mean_constant}, converged, priors};
  return model;
}

EstimatedCostNoise estimate_constant_cost_noise(
    const std::function<double(int, const Eigen::VectorXd&, int)>& query,
    const std::function<double(int, const Eigen::VectorXd&)>& cost_of, int num_sources_total,
    const std::vector<Eigen::VectorXd>& design, int replicates) {
  if (replicates < 2) throw InvalidInput("estimate_constant_cost_noise: need at least two replicates");
  if (design.empty()) throw InvalidInput("estimate_constant_cost_noise: need at least one design point");
  EstimatedCostNoise out;
  for (int l = 0; l < num_sources_total; ++l) {
    double pooled_var = 0.0;
    double mean_cost = 0.0;
    for (const Eigen::VectorXd& x : design) {
      Eigen::VectorXd draws(replicates);
      for (int r = 0; r < replicates; ++r) draws[r] = query(l, x, r);
      pooled_var += sample_variance(draws);
      mean_cost += cost_of(l, x);
    }
    out.noise.push_back(pooled_var / static_cast<double>(design.size()));
    out.cost.push_back(mean_cost / static_cast<double>(design.size()));
  }
  return out;
}

}  // namespace misobo
