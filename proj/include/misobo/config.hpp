/*
 * This file is part of misobo, a library for multi-information source
 * Bayesian optimization.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#ifndef MISOBO_CONFIG_HPP_
#define MISOBO_CONFIG_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "misobo/acquisition.hpp"
#include "misobo/kernel.hpp"

namespace misobo {

/// Value of one config entry: number, string, boolean, or number array.
using ConfigValue = std::variant<double, std::string, bool, std::vector<double>>;

/// Flat key/value file with [section] headers, "key = value" lines and
/// '#' comments. Keys are returned as "section.key".
std::map<std::string, ConfigValue> parse_config_file(const std::string& path);
std::map<std::string, ConfigValue> parse_config_text(const std::string& text,
                                                     const std::string& origin = "<string>");

enum class BudgetMode { TotalCost, Iterations };

/// Fixed kernel hyperparameters (skips fitting when present).
struct FixedKernelConfig {
  std::vector<double> truth_length_scales;
  double truth_signal_variance = 1.0;
  std::vector<std::vector<double>> discrepancy_length_scales;
  std::vector<double> discrepancy_signal_variances;
};

struct RunConfig {
  // [problem]
  std::string problem = "rosenbrock_lam";
  std::string custom_file;          // when problem == "custom"
  int dimension = 2;                // used by two_source_analytic
  std::uint64_t problem_seed = 2026;

  // [kernel]
  KernelFamily kernel_family = KernelFamily::SquaredExponential;
  std::optional<FixedKernelConfig> fixed_kernel;
  std::vector<double> fidelity;     // optional alpha coefficients
  std::vector<int> groups;          // optional group ids over all sources
  std::vector<std::vector<double>> group_length_scales;
  std::vector<double> group_signal_variances;

  // [hyper]
  bool map_priors = true;
  double initial_points_per_dim = 2.5;
  int refit_interval = 0;           // 0 = fit once
  bool estimate_cost_noise = false;
  int noise_estimate_replicates = 5;
  int fit_restarts = 8;

  // [acquisition]
  SearchStrategy strategy = SearchStrategy::MultistartGradient;
  int num_candidates = 0;           // 0 = 50 * dim
  bool resample_candidates = false;
  int restarts = 10;
  double fd_step_frac = 1e-5;
  int h_workers = 1;

  // [budget]
  BudgetMode budget_mode = BudgetMode::TotalCost;
  double budget = 0.0;

  // [run]
  int replications = 1;
  std::uint64_t seed = 0;
  std::string output_dir = ".";
  int jobs = 1;

  void validate() const;
};

/// Loads and validates a run configuration; unknown keys are rejected so
/// typos fail loudly. Errors name the offending field.
RunConfig load_run_config(const std::string& path);
RunConfig run_config_from_values(const std::map<std::string, ConfigValue>& values,
                                 const std::string& origin);

/// Stable digest of the experiment-defining fields (everything except
/// replications, seed, jobs and output paths); used to refuse aggregating
/// heterogeneous results.
std::string config_digest(const RunConfig& config);

}  // namespace misobo

#endif  // MISOBO_CONFIG_HPP_
