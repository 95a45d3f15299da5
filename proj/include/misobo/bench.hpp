/*
 * This file is part of misobo, a library for multi-information source
 * Bayesian optimization.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#ifndef MISOBO_BENCH_HPP_
#define MISOBO_BENCH_HPP_

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "misobo/common.hpp"
#include "misobo/cost.hpp"
#include "misobo/rng.hpp"

namespace misobo {

/// A benchmark with M+1 queryable sources. Source 0 is the (possibly noisy
/// but unbiased) truth source. All problems are exposed as maximization.
struct BenchmarkProblem {
  std::string name;
  int dim = 0;
  Box box;
  /// Evaluator per source; fresh noise is drawn from the supplied stream.
  std::vector<std::function<double(const Eigen::VectorXd&, Rng&)>> sources;
  CostNoiseModel cost_noise;
  /// Exact objective when the benchmark exposes one (for regret/gain).
  std::function<double(const Eigen::VectorXd&)> true_objective;
  std::optional<std::pair<Eigen::VectorXd, double>> known_optimum;

  int num_sources_total() const { return static_cast<int>(sources.size()); }

  /// Counter-based querying: the noise stream is derived from
  /// (seed, source, call_index), so a call is reproducible and repeated
  /// calls with distinct indices draw independent noise.
  double query(int source, const Eigen::VectorXd& x, std::uint64_t seed,
               std::uint64_t call_index) const;
};

/// The 2-d Rosenbrock surface used by the benchmark definitions below.
double rosenbrock(const Eigen::VectorXd& x);
/// The oscillatory bias added to the cheap Rosenbrock source:
/// sin(10 x_0 + 5 x_1).
double rosenbrock_oscillation(const Eigen::VectorXd& x);

enum class RosenbrockConfig {
  /// u = 0, v = 0.1, noise 1e-3 / 1e-6, costs 1000 / 1.
  Lam,
  /// u = 1, v = 2, truth noise 1, truth cost 50 (cheap source unchanged).
  Alternative,
};

/// Two-source Rosenbrock problem on [-2,2]^2, exposed as maximization of
/// -f: source 0 is -(f + u e) with standard normal e, source 1 adds the
/// oscillatory bias -(f + v sin(10 x_0 + 5 x_1)). Optimum -f(1,1) = 0.
BenchmarkProblem rosenbrock_miso(RosenbrockConfig config);

/// Synthetic 8-d stand-in for an assemble-to-order-style benchmark on
/// [0,20]^8 with three sources. The truth surface is a seeded sum of three
/// smooth bumps rescaled to a maximum of about 120; the cheap source carries
/// a seeded smooth bias field with mean about 6 and variance about 200.
/// Noise variances (0.056, 2.944, 0.332) and costs (17.1, 0.5, 3.9).
BenchmarkProblem ato_synthetic(std::uint64_t seed = 2026);

/// Bias field of the synthetic assemble-to-order stand-in (exposed so its
/// calibration is directly testable).
double ato_bias_field(const Eigen::VectorXd& x, std::uint64_t seed = 2026);

/// Controlled two-source problem: truth is the negative sphere on [-1,1]^d,
/// the second source adds 0.05 cos(sum x_j). Unit costs, noiseless sources.
BenchmarkProblem two_source_analytic(int dim);

/// Declarative problem: box, one closed-form expression per source, constant
/// costs and noise variances, optional exact objective expression.
struct CustomProblemSpec {
  int dim = 0;
  Eigen::VectorXd box_lower, box_upper;
  std::vector<std::string> source_exprs;  // source 0 first
  std::vector<double> costs;
  std::vector<double> noises;
  std::string true_objective_expr;  // optional; empty = use source 0 expression
  std::string name = "custom";
};
BenchmarkProblem make_custom_problem(const CustomProblemSpec& spec);

}  // namespace misobo

#endif  // MISOBO_BENCH_HPP_
