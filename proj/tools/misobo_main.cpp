/*
 * This file is part of misobo, a library for multi-information source
 * Bayesian optimization.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "misobo/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"misobo: multi-information source Bayesian optimization"};
  app.require_subcommand(1);

  std::string config_path;
  misobo::Overrides overrides;
  double budget = 0.0;
  int replications = 0;
  std::uint64_t seed = 0;
  std::string output_dir;
  int jobs = 0;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "path to the run configuration file")->required();
    cmd->add_option("--budget", budget, "override the budget limit");
    cmd->add_option("--replications", replications, "override the replication count");
    cmd->add_option("--seed", seed, "override the base seed");
    cmd->add_option("--output-dir", output_dir, "override the output directory");
    cmd->add_option("--jobs", jobs, "worker pool size for replications");
  };

  CLI::App* run = app.add_subcommand("run", "run replicated optimization experiments");
  add_common(run);

  CLI::App* aggregate = app.add_subcommand("aggregate", "aggregate replication CSVs into summary.csv");
  std::string result_dir;
  aggregate->add_option("dir", result_dir, "directory holding rep_*.csv files")->required();

  CLI::App* hyperfit = app.add_subcommand("hyperfit", "fit hyperparameters on the initial design only");
  add_common(hyperfit);

  CLI::App* ckg_eval = app.add_subcommand("ckg-eval", "print the CKG landscape on a design grid");
  int grid_points = 25;
  add_common(ckg_eval);
  ckg_eval->add_option("--grid", grid_points, "grid points (per dimension when d <= 2)");

  CLI11_PARSE(app, argc, argv);

  const auto fill = [&](const CLI::App* cmd) {
    if (cmd->count("--budget")) overrides.budget = budget;
    if (cmd->count("--replications")) overrides.replications = replications;
    if (cmd->count("--seed")) overrides.seed = seed;
    if (cmd->count("--output-dir")) overrides.output_dir = output_dir;
    if (cmd->count("--jobs")) overrides.jobs = jobs;
  };

  if (run->parsed()) {
    fill(run);
    return misobo::cmd_run(config_path, overrides, std::cout);
  }
  if (aggregate->parsed()) {
    return misobo::cmd_aggregate(result_dir, std::cout);
  }
  if (hyperfit->parsed()) {
    fill(hyperfit);
    return misobo::cmd_hyperfit(config_path, overrides, std::cout);
  }
  if (ckg_eval->parsed()) {
    fill(ckg_eval);
    return misobo::cmd_ckg_eval(config_path, overrides, grid_points, std::cout);
  }
  return 1;
}
