/*
 * This file is part of misobo, a library for multi-information source
 * Bayesian optimization.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#ifndef MISOBO_CLI_HPP_
#define MISOBO_CLI_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "misobo/bench.hpp"
#include "misobo/config.hpp"

namespace misobo {

/// Command-line overrides that supersede config-file values. The output
/// directory resolves as: --output-dir flag, then the MISOBO_OUTPUT_DIR
/// environment variable, then the config file.
struct Overrides {
  std::optional<double> budget;
  std::optional<int> replications;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output_dir;
  std::optional<int> jobs;
};

RunConfig apply_overrides(RunConfig config, const Overrides& overrides);

/// Instantiates the benchmark named in the config (including custom problem
/// files, resolved relative to the config's directory).
BenchmarkProblem problem_from_config(const RunConfig& config, const std::string& config_path);

/// Runs all replications (seed = base seed + r), writing rep_NNNN.csv and
/// rep_NNNN.json per replication. Exit codes: 0 success, 1 configuration
/// error, 2 partial failure (some replications aborted).
int cmd_run(const std::string& config_path, const Overrides& overrides, std::ostream& log);

/// Aggregates every rep_*.csv in a directory onto a common cost grid
/// (last-observation-carried-forward per replication) and writes
/// summary.csv with mean gain and mean +/- two standard errors. Refuses
/// directories that mix experiment configurations.
int cmd_aggregate(const std::string& directory, std::ostream& log);

/// Fit-only mode: initial design, priors and MAP fit, printed as JSON.
int cmd_hyperfit(const std::string& config_path, const Overrides& overrides, std::ostream& log);

/// Prints the CKG landscape over a design grid for every source, as CSV
/// (source, x..., h, cost, ckg), after fitting on the initial design.
int cmd_ckg_eval(const std::string& config_path, const Overrides& overrides, int grid_points,
                 std::ostream& log);

}  // namespace misobo

#endif  // MISOBO_CLI_HPP_
