/*
 * This file is part of misobo, a library for multi-information source
 * Bayesian optimization.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#include "misobo/cli.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <thread>
#include <vector>

#include "misobo/acquisition.hpp"
#include "misobo/hyper.hpp"
#include "misobo/loop.hpp"
#include "misobo/rng.hpp"

namespace misobo {

namespace fs = std::filesystem;
using nlohmann::json;

RunConfig apply_overrides(RunConfig config, const Overrides& overrides) {
  if (overrides.budget) config.budget = *overrides.budget;
  if (overrides.replications) config.replications = *overrides.replications;
  if (overrides.seed) config.seed = *overrides.seed;
  if (overrides.jobs) config.jobs = *overrides.jobs;
  if (overrides.output_dir) {
    config.output_dir = *overrides.output_dir;
  } else if (const char* env = std::getenv("MISOBO_OUTPUT_DIR"); env && *env) {
    config.output_dir = env;
  }
  return config;
}

namespace {

CustomProblemSpec custom_spec_from_file(const std::string& path) {
  const auto values = parse_config_file(path);
  CustomProblemSpec spec;
  spec.name = "custom:" + fs::path(path).stem().string();
  const auto get = [&](const std::string& key) -> const ConfigValue* {
    auto it = values.find(key);
    return it == values.end() ? nullptr : &it->second;
  };
  const auto require_array = [&](const std::string& key) {
    const ConfigValue* v = get(key);
    if (!v || !std::holds_alternative<std::vector<double>>(*v)) {
      throw ConfigError(path + ": field '" + key + "' must be an array of numbers");
    }
    return std::get<std::vector<double>>(*v);
  };

  const ConfigValue* dim = get("custom.dimension");
  if (!dim || !std::holds_alternative<double>(*dim)) {
    throw ConfigError(path + ": field 'custom.dimension' must be a number");
  }
  spec.dim = static_cast<int>(std::get<double>(*dim));

  const std::vector<double> lo = require_array("custom.box_lower");
  const std::vector<double> hi = require_array("custom.box_upper");
  spec.box_lower = Eigen::Map<const Eigen::VectorXd>(lo.data(), static_cast<Eigen::Index>(lo.size()));
  spec.box_upper = Eigen::Map<const Eigen::VectorXd>(hi.data(), static_cast<Eigen::Index>(hi.size()));
  spec.costs = require_array("custom.costs");
  spec.noises = require_array("custom.noise");

  for (std::size_t l = 0;; ++l) {
    const ConfigValue* v = get("custom.source_" + std::to_string(l));
    if (!v) break;
    if (!std::holds_alternative<std::string>(*v)) {
      throw ConfigError(path + ": field 'custom.source_" + std::to_string(l) + "' must be a string");
    }
    spec.source_exprs.push_back(std::get<std::string>(*v));
  }
  if (spec.source_exprs.empty()) {
    throw ConfigError(path + ": at least 'custom.source_0' is required");
  }
  if (const ConfigValue* v = get("custom.true_objective"); v) {
    if (!std::holds_alternative<std::string>(*v)) {
      throw ConfigError(path + ": field 'custom.true_objective' must be a string");
    }
    spec.true_objective_expr = std::get<std::string>(*v);
  }
  return spec;
}

}  // namespace

BenchmarkProblem problem_from_config(const RunConfig& config, const std::string& config_path) {
  if (config.problem == "rosenbrock_lam") return rosenbrock_miso(RosenbrockConfig::Lam);
  if (config.problem == "rosenbrock_alt") return rosenbrock_miso(RosenbrockConfig::Alternative);
  if (config.problem == "ato") return ato_synthetic(config.problem_seed);
  if (config.problem == "two_source_analytic") return two_source_analytic(config.dimension);
  if (config.problem == "custom") {
    fs::path file(config.custom_file);
    if (file.is_relative() && !config_path.empty()) {
      file = fs::path(config_path).parent_path() / file;
    }
    if (!fs::exists(file)) {
      throw ConfigError("custom problem file '" + file.string() + "' does not exist");
    }
    return make_custom_problem(custom_spec_from_file(file.string()));
  }
  throw ConfigError("unknown problem '" + config.problem + "'");
}

namespace {

struct LoadedRun {
  RunConfig config;
  BenchmarkProblem problem;
};

/// Shared front half of every subcommand; throws ConfigError on any issue.
LoadedRun load_for_command(const std::string& config_path, const Overrides& overrides) {
  RunConfig config = apply_overrides(load_run_config(config_path), overrides);
  config.validate();
  BenchmarkProblem problem = problem_from_config(config, config_path);
  return LoadedRun{std::move(config), std::move(problem)};
}

std::string replication_stem(int replication) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "rep_%04d", replication);
  return buf;
}

json priors_to_json(const HyperPrior& priors) {
  const auto block = [](const BlockPrior& b) {
    json out;
    out["signal_variance"] = {{"mean", b.signal_variance.mean}, {"variance", b.signal_variance.variance}};
    json ls = json::array();
    for (const NormalPrior& p : b.length_scales) {
      ls.push_back({{"mean", p.mean}, {"variance", p.variance}});
    }
    out["length_scales"] = ls;
    return out;
  };
  json out;
  out["truth"] = block(priors.truth);
  out["discrepancies"] = json::array();
  for (const BlockPrior& b : priors.discrepancy) out["discrepancies"].push_back(block(b));
  return out;
}

/// Initial design, queries, priors and fit; the common setup of the
/// hyperfit and ckg-eval diagnostics.
struct InitialFit {
  std::vector<Eigen::VectorXd> design;
  std::vector<Observation> observations;
  HyperPrior priors;
  FittedModel model;
};

InitialFit initial_fit(const BenchmarkProblem& problem, const RunConfig& config) {
  const int d = problem.dim;
  const int n_init = std::max(2, static_cast<int>(std::ceil(config.initial_points_per_dim * d)));
  InitialFit out;
  out.design = latin_hypercube_points(n_init, problem.box, mix_seed(config.seed, 0x1d));

  const int sources = problem.num_sources_total();
  std::uint64_t counter = 0;
  std::vector<Eigen::VectorXd> values(static_cast<std::size_t>(sources), Eigen::VectorXd(n_init));
  std::vector<Eigen::VectorXd> noises(static_cast<std::size_t>(sources), Eigen::VectorXd(n_init));
  for (int l = 0; l < sources; ++l) {
    for (int i = 0; i < n_init; ++i) {
      const Eigen::VectorXd& x = out.design[static_cast<std::size_t>(i)];
      values[static_cast<std::size_t>(l)][i] = problem.query(l, x, config.seed, counter++);
      noises[static_cast<std::size_t>(l)][i] = problem.cost_noise.noise_var(l, x);
      out.observations.emplace_back(l, x, values[static_cast<std::size_t>(l)][i],
                                    noises[static_cast<std::size_t>(l)][i]);
    }
  }
  const DifferenceDataset data(out.design, values, noises);
  out.priors = build_priors(data, problem.box);
  FitOptions options;
  options.use_priors = config.map_priors;
  options.restarts = config.fit_restarts;
  options.seed = mix_seed(config.seed, 0xf17);
  out.model = fit_map(data, out.priors, config.kernel_family, options);
  return out;
}

}  // namespace

int cmd_run(const std::string& config_path, const Overrides& overrides, std::ostream& log) {
  LoadedRun loaded;
  try {
    loaded = load_for_command(config_path, overrides);
  } catch (const std::exception& e) {
    log << "config error: " << e.what() << "\n";
    return 1;
  }
  const RunConfig& config = loaded.config;

  std::error_code ec;
  fs::create_directories(config.output_dir, ec);
  if (ec) {
    log << "config error: cannot create output directory '" << config.output_dir
        << "': " << ec.message() << "\n";
    return 1;
  }

  const int reps = config.replications;
  std::vector<std::string> messages(static_cast<std::size_t>(reps));
  std::vector<int> status(static_cast<std::size_t>(reps), 0);
  std::atomic<int> next{0};

  const auto worker = [&] {
    while (true) {
      const int r = next.fetch_add(1);
      if (r >= reps) return;
      const std::uint64_t seed = config.seed + static_cast<std::uint64_t>(r);
      try {
        const RunResult result = run(loaded.problem, config, seed);
        const fs::path stem = fs::path(config.output_dir) / replication_stem(r);
        write_records_csv(stem.string() + ".csv", result);
        std::ofstream sidecar(stem.string() + ".json");
        sidecar << run_result_to_json(result, config, seed).dump(2) << "\n";
        std::ostringstream msg;
        msg << replication_stem(r) << ": " << result.records.size() << " queries, final gain "
            << (result.final_true_value() - result.initial.best_initial_true) << ", total cost "
            << (result.records.empty() ? result.initial.cost : result.records.back().cum_cost);
        if (result.aborted) {
          msg << " [aborted: " << result.abort_reason << "]";
          status[static_cast<std::size_t>(r)] = 2;
        }
        messages[static_cast<std::size_t>(r)] = msg.str();
      } catch (const std::exception& e) {
        messages[static_cast<std::size_t>(r)] = replication_stem(r) + std::string(": failed: ") + e.what();
        status[static_cast<std::size_t>(r)] = 2;
      }
    }
  };

  const int jobs = std::min(config.jobs, reps);
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  bool partial = false;
  for (int r = 0; r < reps; ++r) {
    log << messages[static_cast<std::size_t>(r)] << "\n";
    partial = partial || status[static_cast<std::size_t>(r)] != 0;
  }
  return partial ? 2 : 0;
}

namespace {

struct ReplicationCurve {
  std::vector<double> cost;  // ascending
  std::vector<double> gain;
  double final_cost = 0.0;
};

double locf(const ReplicationCurve& curve, double cost) {
  // Value of the last point at or below `cost`; before the first point the
  // first value is carried backward.
  double value = curve.gain.front();
  for (std::size_t i = 0; i < curve.cost.size() && curve.cost[i] <= cost; ++i) {
    value = curve.gain[i];
  }
  return value;
}

}  // namespace

int cmd_aggregate(const std::string& directory, std::ostream& log) {
  std::vector<fs::path> csv_files;
  if (!fs::is_directory(directory)) {
    log << "error: '" << directory << "' is not a directory\n";
    return 1;
  }
  for (const auto& entry : fs::directory_iterator(directory)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("rep_", 0) == 0 && entry.path().extension() == ".csv") {
      csv_files.push_back(entry.path());
    }
  }
  std::sort(csv_files.begin(), csv_files.end());
  if (csv_files.empty()) {
    log << "error: no rep_*.csv files in '" << directory << "'\n";
    return 1;
  }

  std::vector<ReplicationCurve> curves;
  std::string digest;
  try {
    for (const fs::path& csv : csv_files) {
      fs::path sidecar = csv;
      sidecar.replace_extension(".json");
      if (!fs::exists(sidecar)) {
        log << "error: missing sidecar '" << sidecar.string() << "'\n";
        return 1;
      }
      std::ifstream in(sidecar);
      const json j = json::parse(in);
      const std::string this_digest = j.at("config_digest").get<std::string>();
      if (digest.empty()) {
        digest = this_digest;
      } else if (digest != this_digest) {
        log << "error: '" << csv.filename().string()
            << "' belongs to a different experiment configuration\n";
        return 1;
      }
      const double baseline = j.at("initial").at("best_initial_true").get<double>();
      ReplicationCurve curve;
      curve.cost.push_back(j.at("initial").at("cost").get<double>());
      curve.gain.push_back(j.at("initial").at("true_value").get<double>() - baseline);
      for (const IterationRecord& r : read_records_csv(csv.string())) {
        curve.cost.push_back(r.cum_cost);
        curve.gain.push_back(r.true_value - baseline);
      }
      curve.final_cost = curve.cost.back();
      curves.push_back(std::move(curve));
    }
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return 1;
  }

  std::vector<double> grid;
  for (const ReplicationCurve& c : curves) grid.insert(grid.end(), c.cost.begin(), c.cost.end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  const fs::path out_path = fs::path(directory) / "summary.csv";
  std::ofstream out(out_path);
  out << "cum_cost,mean_gain,gain_lo,gain_hi\n";
  const double reps = static_cast<double>(curves.size());
  double final_mean = 0.0;
  for (double cost : grid) {
    double sum = 0.0, sum_sq = 0.0;
    for (const ReplicationCurve& c : curves) {
      const double g = locf(c, cost);
      sum += g;
      sum_sq += g * g;
    }
    const double mean = sum / reps;
    double se = 0.0;
    if (curves.size() > 1) {
      const double var = std::max(0.0, (sum_sq - reps * mean * mean) / (reps - 1.0));
      se = std::sqrt(var / reps);
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", cost, mean, mean - 2.0 * se,
                  mean + 2.0 * se);
    out << buf;
    final_mean = mean;
  }
  double mean_final_cost = 0.0;
  for (const ReplicationCurve& c : curves) mean_final_cost += c.final_cost;
  mean_final_cost /= reps;

  log << "aggregated " << curves.size() << " replications onto " << grid.size()
      << " cost points -> " << out_path.string() << "\n";
  log << "final mean gain " << final_mean << " at mean cumulative cost " << mean_final_cost << "\n";
  return 0;
}

int cmd_hyperfit(const std::string& config_path, const Overrides& overrides, std::ostream& log) {
  LoadedRun loaded;
  try {
    loaded = load_for_command(config_path, overrides);
  } catch (const std::exception& e) {
    log << "config error: " << e.what() << "\n";
    return 1;
  }
  try {
    const InitialFit fit = initial_fit(loaded.problem, loaded.config);
    json out;
    out["problem"] = loaded.problem.name;
    out["num_initial_points"] = fit.design.size();
    out["priors"] = priors_to_json(fit.priors);
    json fitted;
    fitted["mean_constant"] = fit.model.mean.constant;
    const auto block = [](const BaseKernel& k) {
      const Eigen::VectorXd ls = k.length_scales();
      return json{{"family", to_string(k.family())},
                  {"length_scales", std::vector<double>(ls.data(), ls.data() + ls.size())},
                  {"signal_variance", k.signal_variance()}};
    };
    fitted["truth"] = block(fit.model.kernel.truth_kernel());
    fitted["discrepancies"] = json::array();
    for (const BaseKernel& k : fit.model.kernel.discrepancy_kernels()) {
      fitted["discrepancies"].push_back(block(k));
    }
    fitted["converged"] = fit.model.converged;
    out["fitted"] = fitted;
    log << out.dump(2) << "\n";
    return 0;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_ckg_eval(const std::string& config_path, const Overrides& overrides, int grid_points,
                 std::ostream& log) {
  LoadedRun loaded;
  try {
    loaded = load_for_command(config_path, overrides);
  } catch (const std::exception& e) {
    log << "config error: " << e.what() << "\n";
    return 1;
  }
  if (grid_points < 2) {
    log << "config error: grid must have at least 2 points\n";
    return 1;
  }
  try {
    const RunConfig& config = loaded.config;
    const BenchmarkProblem& problem = loaded.problem;
    const InitialFit fit = initial_fit(problem, config);
    const PosteriorState state(fit.model.kernel, fit.model.mean, fit.observations);
    const int num_candidates = config.num_candidates > 0 ? config.num_candidates : 50 * problem.dim;
    const DiscreteCandidateSet candidates =
        latin_hypercube(num_candidates, problem.box, mix_seed(config.seed, 0xca));
    AcquisitionOptions options;
    options.h_workers = config.h_workers;
    const CkgEvaluator evaluator(state, candidates, problem.cost_noise, options);

    std::vector<Eigen::VectorXd> grid;
    if (problem.dim <= 2) {
      // Lattice for plots; row-major over dimensions.
      if (problem.dim == 1) {
        for (int i = 0; i < grid_points; ++i) {
          Eigen::VectorXd x(1);
          x[0] = problem.box.lower()[0] + problem.box.width(0) * i / (grid_points - 1);
          grid.push_back(x);
        }
      } else {
        for (int i = 0; i < grid_points; ++i) {
          for (int j = 0; j < grid_points; ++j) {
            Eigen::VectorXd x(2);
            x[0] = problem.box.lower()[0] + problem.box.width(0) * i / (grid_points - 1);
            x[1] = problem.box.lower()[1] + problem.box.width(1) * j / (grid_points - 1);
            grid.push_back(x);
          }
        }
      }
    } else {
      grid = latin_hypercube_points(grid_points, problem.box, mix_seed(config.seed, 0x96d));
    }

    log << "source";
    for (int i = 0; i < problem.dim; ++i) log << ",x_" << i;
    log << ",h,cost,ckg\n";
    char buf[64];
    for (int l = 0; l < problem.num_sources_total(); ++l) {
      for (const Eigen::VectorXd& x : grid) {
        const AcquisitionResult r = evaluator.evaluate(l, x);
        log << l;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
          std::snprintf(buf, sizeof(buf), ",%.17g", x[i]);
          log << buf;
        }
        std::snprintf(buf, sizeof(buf), ",%.17g,%.17g,%.17g\n", r.h_value, r.cost, r.ckg);
        log << buf;
      }
    }
    return 0;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace misobo
