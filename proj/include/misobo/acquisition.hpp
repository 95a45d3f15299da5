/*
 * This file is part of misobo, a library for multi-information source
 * Bayesian optimization.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#ifndef MISOBO_ACQUISITION_HPP_
#define MISOBO_ACQUISITION_HPP_

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "misobo/common.hpp"
#include "misobo/cost.hpp"
#include "misobo/gp.hpp"

namespace misobo {

/// Discretization of the inner maximization over designs.
struct DiscreteCandidateSet {
  enum class Origin { LatinHypercube, UserSupplied };

  std::vector<Eigen::VectorXd> points;
  Origin origin = Origin::UserSupplied;

  /// Validates the user-supplied invariants: at least two points, all inside
  /// the box, pairwise distinct.
  static DiscreteCandidateSet user_supplied(std::vector<Eigen::VectorXd> points, const Box& box);
};

/// Latin hypercube sample of n points: exactly one point per axis stratum in
/// every dimension. Deterministic for a fixed seed.
std::vector<Eigen::VectorXd> latin_hypercube_points(int n, const Box& box, std::uint64_t seed);
DiscreteCandidateSet latin_hypercube(int n, const Box& box, std::uint64_t seed);

/// h(a, b) = E[max_i (a_i + b_i Z)] - max_i a_i for scalar standard normal Z,
/// computed analytically: sort by ascending b (keeping only the largest a
/// among ties), prune entries that never attain the maximum by the breakpoint
/// scan, and sum (b_{i+1} - b_i) * emv(-|c_i|) over surviving breakpoints.
/// Always nonnegative.
double h_function(std::span<const double> a, std::span<const double> b);

/// Same value as h_function within 1e-12, computed by splitting the sorted
/// sequence into `workers` contiguous chunks scanned concurrently, merging
/// adjacent chunks pairwise, and summing per-chunk contributions. With
/// workers = 1 this is the sequential path, bit for bit.
double h_function_parallel(std::span<const double> a, std::span<const double> b, int workers);

struct AcquisitionResult {
  int source = -1;
  Eigen::VectorXd x;
  double ckg = 0.0;     // h / cost
  double h_value = 0.0;
  double cost = 0.0;
  /// Set when every candidate's value was nonpositive within tolerance.
  bool no_improvement = false;
};

enum class SearchStrategy { MultistartGradient, DiscreteEnumeration };

struct AcquisitionOptions {
  int restarts = 10;             // gradient restarts per source
  int max_iterations = 100;      // ascent iteration cap
  double fd_step_frac = 1e-5;    // of box width
  double convergence_frac = 1e-6;
  int h_workers = 1;             // > 1 enables the parallel h inside ckg
  std::uint64_t seed = 0;        // restart-point stream
};

/// Evaluates the cost-sensitive knowledge gradient of candidate pairs
/// against a fixed posterior and target set. The target vector `a` holds the
/// truth-source posterior means over A; `b` is the one-step deviation vector
/// of the candidate. Evaluations are pure; one evaluator may be shared by
/// concurrent callers.
class CkgEvaluator {
 public:
  CkgEvaluator(const PosteriorState& state, const DiscreteCandidateSet& candidates,
               const CostNoiseModel& cost_model, const AcquisitionOptions& options = {});

  AcquisitionResult evaluate(int source, const Eigen::VectorXd& x) const;
  int num_sources_total() const { return cost_model_->num_sources_total(); }
  const std::vector<Eigen::VectorXd>& target_designs() const { return designs_; }

 private:
  const CostNoiseModel* cost_model_;
  OneStepLookahead lookahead_;
  std::vector<Eigen::VectorXd> designs_;
  AcquisitionOptions options_;
};

/// One-off evaluation of CKG(source, x). Rejects nonpositive query costs.
AcquisitionResult ckg(const PosteriorState& state, const DiscreteCandidateSet& candidates,
                      const AugmentedPoint& candidate, const CostNoiseModel& cost_model,
                      const AcquisitionOptions& options = {});

/// Maximizes CKG over sources and designs. DiscreteEnumeration takes the
/// exact argmax over sources x A with ties broken by lower cost, then lower
/// source index, then lexicographically smaller design. MultistartGradient
/// runs restarts of projected quasi-Newton ascent per source and never
/// returns less than the enumeration value (safeguard comparison included).
/// Candidates whose cost exceeds `budget_remaining` are excluded.
AcquisitionResult next_sample(const PosteriorState& state, const DiscreteCandidateSet& candidates,
                              const CostNoiseModel& cost_model, SearchStrategy strategy,
                              const Box& box, const AcquisitionOptions& options = {},
                              double budget_remaining = std::numeric_limits<double>::infinity());

}  // namespace misobo

#endif  // MISOBO_ACQUISITION_HPP_
