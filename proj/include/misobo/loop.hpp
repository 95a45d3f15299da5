/*
 * This file is part of misobo, a library for multi-information source
 * Bayesian optimization.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#ifndef MISOBO_LOOP_HPP_
#define MISOBO_LOOP_HPP_

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

#include "misobo/bench.hpp"
#include "misobo/config.hpp"
#include "misobo/gp.hpp"
#include "misobo/hyper.hpp"

namespace misobo {

/// One acquisition step: the query made, its cost, and the recommendation
/// after conditioning on it. cum_cost includes the fixed initial-data cost.
struct IterationRecord {
  int iter = 0;
  int source = 0;
  Eigen::VectorXd x;
  double y = 0.0;
  double cost = 0.0;
  double cum_cost = 0.0;
  Eigen::VectorXd rec_x;
  double rec_mu = 0.0;
  double true_value = 0.0;  // NaN when the problem has no exact objective
};

/// State after the initial design, before any acquisition step.
struct InitialSummary {
  double cost = 0.0;             // cost of gathering the initial data
  double best_initial_true = 0;  // gain baseline: best true value on the initial design
  Eigen::VectorXd rec_x;
  double rec_mu = 0.0;
  double true_value = 0.0;
};

struct RunResult {
  int dim = 0;
  std::vector<IterationRecord> records;
  InitialSummary initial;
  FittedModel model;
  std::vector<Observation> initial_observations;
  bool aborted = false;
  std::string abort_reason;

  const Eigen::VectorXd& final_recommendation() const {
    return records.empty() ? initial.rec_x : records.back().rec_x;
  }
  double final_true_value() const {
    return records.empty() ? initial.true_value : records.back().true_value;
  }
};

/// Space-filling evaluation grid for recommendations, of size 1000 * dim.
struct RecommendationGrid {
  std::vector<Eigen::VectorXd> points;
};
RecommendationGrid make_recommendation_grid(const Box& box, std::uint64_t seed);

struct Recommendation {
  Eigen::VectorXd x;
  double mu = 0.0;
};

/// Approximate argmax of the truth-source posterior mean: grid argmax (first
/// grid point wins ties) refined by one multistart ascent started from the
/// best grid points; the refinement is kept only when it strictly improves.
Recommendation recommend_on_grid(const PosteriorState& state, const RecommendationGrid& grid,
                                 const Box& box);
/// Convenience form that builds its own seeded grid.
Eigen::VectorXd recommend(const PosteriorState& state, const Box& box, std::uint64_t seed);

/// Runs the full optimization: initial design per source, hyperparameter
/// fit, acquisition/observe/update until the budget is exhausted, with a
/// recommendation recorded after every step. Deterministic for a fixed
/// (config, seed): reruns produce byte-identical CSV output.
RunResult run(const BenchmarkProblem& problem, const RunConfig& config, std::uint64_t seed);

/// CSV schema: iter,source,x_0..x_{d-1},y,cost,cum_cost,rec_x_0..,rec_mu,true_value.
/// Values are written with "%.17g" so parsing returns the exact doubles.
std::string records_csv_header(int dim);
void write_records_csv(const std::string& path, const RunResult& result);
std::vector<IterationRecord> read_records_csv(const std::string& path, int* dim_out = nullptr);

/// JSON run log: configuration echo and digest, seed, initial summary,
/// fitted hyperparameters and the observation list (enough to rebuild the
/// posterior), final recommendation, abort state.
nlohmann::json run_result_to_json(const RunResult& result, const RunConfig& config,
                                  std::uint64_t seed);

}  // namespace misobo

#endif  // MISOBO_LOOP_HPP_
