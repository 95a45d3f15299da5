/*
 * This file is part of misobo, a library for multi-information source
 * Bayesian optimization.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#include "misobo/loop.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "misobo/acquisition.hpp"
#include "misobo/ascent.hpp"

namespace misobo {

namespace {

constexpr std::uint64_t kInitDesignTag = 0x1d;
constexpr std::uint64_t kCandidateTag = 0xca;
constexpr std::uint64_t kRecGridTag = 0x4ec;
constexpr std::uint64_t kAcquisitionTag = 0xac9;
constexpr std::uint64_t kFitTag = 0xf17;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Builds group kernels from configuration (group discrepancies are not
/// fitted from data; the run config supplies their hyperparameters).
std::vector<BaseKernel> group_kernels_from_config(const RunConfig& config, int dim) {
  std::vector<BaseKernel> kernels;
  if (config.groups.empty()) return kernels;
  if (config.group_signal_variances.size() != config.group_length_scales.size() ||
      config.group_signal_variances.empty()) {
    throw ConfigError("group kernels: need matching length-scale and signal-variance lists");
  }
  for (std::size_t q = 0; q < config.group_signal_variances.size(); ++q) {
    const std::vector<double>& ls = config.group_length_scales[q];
    if (static_cast<int>(ls.size()) != dim) {
      throw ConfigError("group kernels: length-scale list dimension mismatch");
    }
    kernels.emplace_back(config.kernel_family,
                         Eigen::Map<const Eigen::VectorXd>(ls.data(), dim),
                         config.group_signal_variances[q]);
  }
  return kernels;
}

MisoKernel with_config_structure(BaseKernel truth, std::vector<BaseKernel> discrepancies,
                                 const RunConfig& config, int dim) {
  return MisoKernel(std::move(truth), std::move(discrepancies), config.fidelity, config.groups,
                    group_kernels_from_config(config, dim));
}

FittedModel model_from_fixed(const RunConfig& config, const DifferenceDataset& data, int dim) {
  const FixedKernelConfig& fixed = *config.fixed_kernel;
  const int m = data.num_sources_total() - 1;
  if (static_cast<int>(fixed.truth_length_scales.size()) != dim) {
    throw ConfigError("kernel.truth_length_scales must have one entry per dimension");
  }
  if (static_cast<int>(fixed.discrepancy_signal_variances.size()) != m) {
    throw ConfigError("kernel.discrepancy_signal_variances must have one entry per biased source");
  }
  BaseKernel truth(config.kernel_family,
                   Eigen::Map<const Eigen::VectorXd>(fixed.truth_length_scales.data(), dim),
                   fixed.truth_signal_variance);
  std::vector<BaseKernel> discrepancies;
  for (int l = 0; l < m; ++l) {
    const std::vector<double>& ls = fixed.discrepancy_length_scales[static_cast<std::size_t>(l)];
    if (static_cast<int>(ls.size()) != dim) {
      throw ConfigError("kernel.discrepancy_length_scales_" + std::to_string(l + 1) +
                        " must have one entry per dimension");
    }
    discrepancies.emplace_back(config.kernel_family,
                               Eigen::Map<const Eigen::VectorXd>(ls.data(), dim),
                               fixed.discrepancy_signal_variances[static_cast<std::size_t>(l)]);
  }
  FittedModel model{with_config_structure(std::move(truth), std::move(discrepancies), config, dim),
                    MeanFunction{data.values(0).mean()}, true, HyperPrior{}};
  return model;
}

}  // namespace

RecommendationGrid make_recommendation_grid(const Box& box, std::uint64_t seed) {
  return RecommendationGrid{latin_hypercube_points(1000 * box.dim(), box, seed)};
}

Recommendation recommend_on_grid(const PosteriorState& state, const RecommendationGrid& grid,
                                 const Box& box) {
  if (grid.points.empty()) throw InvalidInput("recommend: empty evaluation grid");
  const std::size_t n = grid.points.size();
  std::vector<double> means(n);
  for (std::size_t i = 0; i < n; ++i) {
    means[i] = state.posterior_mean(AugmentedPoint(0, grid.points[i]));
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (means[i] > means[best]) best = i;  // first grid point wins ties
  }

  Recommendation rec{grid.points[best], means[best]};
  // One multistart ascent from the best grid points; keep strict improvements.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  const std::size_t starts = std::min<std::size_t>(5, n);
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(starts), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (means[a] != means[b]) return means[a] > means[b];
                      return a < b;
                    });
  const Objective mean_objective = [&state](const Eigen::VectorXd& x) {
    return state.posterior_mean(AugmentedPoint(0, x));
  };
  for (std::size_t k = 0; k < starts; ++k) {
    const AscentResult refined = maximize_in_box(mean_objective, box, grid.points[order[k]]);
    if (refined.value > rec.mu) {
      rec.mu = refined.value;
      rec.x = refined.x;
    }
  }
  return rec;
}

Eigen::VectorXd recommend(const PosteriorState& state, const Box& box, std::uint64_t seed) {
  return recommend_on_grid(state, make_recommendation_grid(box, seed), box).x;
}

RunResult run(const BenchmarkProblem& problem, const RunConfig& config, std::uint64_t seed) {
  const int d = problem.dim;
  const Box& box = problem.box;
  const int sources = problem.num_sources_total();

  RunResult result;
  result.dim = d;
  std::uint64_t counter = 0;
  double initial_cost = 0.0;

  const int n_init =
      std::max(2, static_cast<int>(std::ceil(config.initial_points_per_dim * d)));
  const std::vector<Eigen::VectorXd> design =
      latin_hypercube_points(n_init, box, mix_seed(seed, kInitDesignTag));

  CostNoiseModel cost_model = problem.cost_noise;
  if (config.estimate_cost_noise) {
    const auto query = [&](int l, const Eigen::VectorXd& x, int) {
      initial_cost += problem.cost_noise.query_cost(l, x);
      return problem.query(l, x, seed, counter++);
    };
    const auto cost_of = [&](int l, const Eigen::VectorXd& x) {
      return problem.cost_noise.query_cost(l, x);
    };
    const EstimatedCostNoise est = estimate_constant_cost_noise(
        query, cost_of, sources, design, config.noise_estimate_replicates);
    cost_model = CostNoiseModel::constant(est.cost, est.noise);
  }

  // Identical initial design for every source.
  std::vector<Eigen::VectorXd> values(static_cast<std::size_t>(sources),
                                      Eigen::VectorXd(n_init));
  std::vector<Eigen::VectorXd> noises(static_cast<std::size_t>(sources),
                                      Eigen::VectorXd(n_init));
  for (int l = 0; l < sources; ++l) {
    for (int i = 0; i < n_init; ++i) {
      const Eigen::VectorXd& x = design[static_cast<std::size_t>(i)];
      values[static_cast<std::size_t>(l)][i] = problem.query(l, x, seed, counter++);
      noises[static_cast<std::size_t>(l)][i] = cost_model.noise_var(l, x);
      initial_cost += cost_model.query_cost(l, x);
      result.initial_observations.emplace_back(l, x, values[static_cast<std::size_t>(l)][i],
                                               noises[static_cast<std::size_t>(l)][i]);
    }
  }
  const DifferenceDataset data(design, values, noises);

  FitOptions fit_options;
  fit_options.use_priors = config.map_priors;
  fit_options.restarts = config.fit_restarts;
  fit_options.seed = mix_seed(seed, kFitTag);
  if (config.fixed_kernel) {
    result.model = model_from_fixed(config, data, d);
  } else {
    const HyperPrior priors = build_priors(data, box);
    FittedModel fitted = fit_map(data, priors, config.kernel_family, fit_options);
    result.model =
        FittedModel{with_config_structure(fitted.kernel.truth_kernel(),
                                          fitted.kernel.discrepancy_kernels(), config, d),
                    fitted.mean, fitted.converged, fitted.priors};
  }

  PosteriorState state(result.model.kernel, result.model.mean, result.initial_observations);

  const int num_candidates = config.num_candidates > 0 ? config.num_candidates : 50 * d;
  DiscreteCandidateSet candidates =
      latin_hypercube(num_candidates, box, mix_seed(seed, kCandidateTag));
  const RecommendationGrid grid = make_recommendation_grid(box, mix_seed(seed, kRecGridTag));

  const auto true_value_at = [&](const Eigen::VectorXd& x) {
    return problem.true_objective ? problem.true_objective(x) : kNaN;
  };

  result.initial.cost = initial_cost;
  if (problem.true_objective) {
    double best = -std::numeric_limits<double>::infinity();
    for (const Eigen::VectorXd& x : design) best = std::max(best, problem.true_objective(x));
    result.initial.best_initial_true = best;
  } else {
    result.initial.best_initial_true = values[0].maxCoeff();
  }
  {
    const Recommendation rec = recommend_on_grid(state, grid, box);
    result.initial.rec_x = rec.x;
    result.initial.rec_mu = rec.mu;
    result.initial.true_value = true_value_at(rec.x);
  }

  const bool cost_mode = (config.budget_mode == BudgetMode::TotalCost);
  double remaining = config.budget;
  const long max_iterations = cost_mode ? std::numeric_limits<long>::max()
                                        : std::lround(config.budget);
  double cum_cost = initial_cost;

  for (long iter = 1; iter <= max_iterations; ++iter) {
    if (cost_mode) {
      double min_cost = std::numeric_limits<double>::infinity();
      for (int l = 0; l < sources; ++l) {
        for (const Eigen::VectorXd& x : candidates.points) {
          min_cost = std::min(min_cost, cost_model.query_cost(l, x));
        }
      }
      if (min_cost > remaining) break;  // nothing affordable, budget exhausted
    }
    if (config.resample_candidates && iter > 1) {
      candidates = latin_hypercube(num_candidates, box,
                                   mix_seed(seed, kCandidateTag, static_cast<std::uint64_t>(iter)));
    }
    if (config.refit_interval > 0 && !config.fixed_kernel && iter > 1 &&
        (iter - 1) % config.refit_interval == 0) {
      // Refit the truth block on the pooled observations of every source.
      // A biased source's values inform the truth kernel once its own
      // discrepancy is absorbed into the noise term (its observations are
      // truth plus an independent draw of marginal variance alpha * sv).
      // The discrepancy blocks keep their initial-design fits: differences
      // are only defined on the shared design, which does not grow.
      std::vector<Eigen::VectorXd> pooled_design;
      std::vector<double> pooled_values, pooled_noise;
      for (const Observation& o : state.observations()) {
        double extra = 0.0;
        if (o.source > 0) {
          extra = result.model.kernel.fidelity()[static_cast<std::size_t>(o.source - 1)] *
                  result.model.kernel.discrepancy_kernel(o.source).signal_variance();
        }
        pooled_design.push_back(o.x);
        pooled_values.push_back(o.y);
        pooled_noise.push_back(o.noise_var + extra);
      }
      if (pooled_design.size() >= 2) {
        const Eigen::VectorXd pv = Eigen::Map<const Eigen::VectorXd>(
            pooled_values.data(), static_cast<Eigen::Index>(pooled_values.size()));
        const Eigen::VectorXd pn = Eigen::Map<const Eigen::VectorXd>(
            pooled_noise.data(), static_cast<Eigen::Index>(pooled_noise.size()));
        const double mean_constant = pv.mean();
        const BaseKernel truth =
            fit_single_block(pooled_design, pv, pn, mean_constant, config.kernel_family,
                             result.model.priors.truth, fit_options, static_cast<std::uint64_t>(iter));
        result.model.kernel = with_config_structure(truth, result.model.kernel.discrepancy_kernels(),
                                                    config, d);
        result.model.mean = MeanFunction{mean_constant};
        state = PosteriorState(result.model.kernel, result.model.mean, state.observations());
      }
    }

    AcquisitionOptions acq;
    acq.restarts = config.restarts;
    acq.fd_step_frac = config.fd_step_frac;
    acq.h_workers = config.h_workers;
    acq.seed = mix_seed(seed, kAcquisitionTag, static_cast<std::uint64_t>(iter));
    const double budget_filter = cost_mode ? remaining : std::numeric_limits<double>::infinity();

    AcquisitionResult pick;
    try {
      pick = next_sample(state, candidates, cost_model, config.strategy, box, acq, budget_filter);
    } catch (const InvalidInput&) {
      break;  // no affordable candidate left
    }

    double y = 0.0;
    bool observed = false;
    std::string error;
    for (int attempt = 0; attempt < 2 && !observed; ++attempt) {
      try {
        y = problem.query(pick.source, pick.x, seed, counter++);
        observed = true;
      } catch (const std::exception& e) {
        error = e.what();
      }
    }
    if (!observed) {
      result.aborted = true;
      result.abort_reason = "source query failed after retry: " + error;
      break;
    }

    try {
      state = state.update(Observation(pick.source, pick.x, y,
                                       cost_model.noise_var(pick.source, pick.x)));
    } catch (const std::exception& e) {
      result.aborted = true;
      result.abort_reason = std::string("posterior update failed: ") + e.what();
      break;
    }

    cum_cost += pick.cost;
    if (cost_mode) remaining -= pick.cost;

    const Recommendation rec = recommend_on_grid(state, grid, box);
    IterationRecord record;
    record.iter = static_cast<int>(iter);
    record.source = pick.source;
    record.x = pick.x;
    record.y = y;
    record.cost = pick.cost;
    record.cum_cost = cum_cost;
    record.rec_x = rec.x;
    record.rec_mu = rec.mu;
    record.true_value = true_value_at(rec.x);
    result.records.push_back(std::move(record));
  }
  return result;
}

std::string records_csv_header(int dim) {
  std::ostringstream out;
  out << "iter,source";
  for (int i = 0; i < dim; ++i) out << ",x_" << i;
  out << ",y,cost,cum_cost";
  for (int i = 0; i < dim; ++i) out << ",rec_x_" << i;
  out << ",rec_mu,true_value";
  return out.str();
}

void write_records_csv(const std::string& path, const RunResult& result) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << records_csv_header(result.dim) << "\n";
  for (const IterationRecord& r : result.records) {
    out << r.iter << ',' << r.source;
    for (Eigen::Index i = 0; i < r.x.size(); ++i) out << ',' << format_value(r.x[i]);
    out << ',' << format_value(r.y) << ',' << format_value(r.cost) << ','
        << format_value(r.cum_cost);
    for (Eigen::Index i = 0; i < r.rec_x.size(); ++i) out << ',' << format_value(r.rec_x[i]);
    out << ',' << format_value(r.rec_mu) << ',' << format_value(r.true_value) << "\n";
  }
}

std::vector<IterationRecord> read_records_csv(const std::string& path, int* dim_out) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "' for reading");
  std::string header;
  if (!std::getline(in, header)) throw ConfigError("'" + path + "': empty file");

  int dim = 0;
  {
    std::stringstream ss(header);
    std::string column;
    while (std::getline(ss, column, ',')) {
      if (column.rfind("x_", 0) == 0) ++dim;
    }
    if (dim == 0 || records_csv_header(dim) != header) {
      throw ConfigError("'" + path + "': unrecognized record header");
    }
  }
  if (dim_out) *dim_out = dim;

  std::vector<IterationRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    const std::size_t expected = 2 + static_cast<std::size_t>(dim) + 3 +
                                 static_cast<std::size_t>(dim) + 2;
    if (fields.size() != expected) throw ConfigError("'" + path + "': malformed record line");

    IterationRecord r;
    std::size_t k = 0;
    r.iter = std::atoi(fields[k++].c_str());
    r.source = std::atoi(fields[k++].c_str());
    r.x.resize(dim);
    for (int i = 0; i < dim; ++i) r.x[i] = std::strtod(fields[k++].c_str(), nullptr);
    r.y = std::strtod(fields[k++].c_str(), nullptr);
    r.cost = std::strtod(fields[k++].c_str(), nullptr);
    r.cum_cost = std::strtod(fields[k++].c_str(), nullptr);
    r.rec_x.resize(dim);
    for (int i = 0; i < dim; ++i) r.rec_x[i] = std::strtod(fields[k++].c_str(), nullptr);
    r.rec_mu = std::strtod(fields[k++].c_str(), nullptr);
    r.true_value = std::strtod(fields[k++].c_str(), nullptr);
    records.push_back(std::move(r));
  }
  return records;
}

namespace {

nlohmann::json kernel_block_to_json(const BaseKernel& k) {
  const Eigen::VectorXd ls = k.length_scales();
  return nlohmann::json{{"family", to_string(k.family())},
                        {"length_scales", std::vector<double>(ls.data(), ls.data() + ls.size())},
                        {"signal_variance", k.signal_variance()}};
}

}  // namespace

nlohmann::json run_result_to_json(const RunResult& result, const RunConfig& config,
                                  std::uint64_t seed) {
  nlohmann::json j;
  j["seed"] = seed;
  j["config"] = {{"problem", config.problem},
                 {"dimension", config.dimension},
                 {"problem_seed", config.problem_seed},
                 {"kernel_family", to_string(config.kernel_family)},
                 {"map_priors", config.map_priors},
                 {"initial_points_per_dim", config.initial_points_per_dim},
                 {"refit_interval", config.refit_interval},
                 {"estimate_cost_noise", config.estimate_cost_noise},
                 {"strategy", config.strategy == SearchStrategy::MultistartGradient
                                  ? "gradient"
                                  : "enumeration"},
                 {"num_candidates", config.num_candidates},
                 {"resample_candidates", config.resample_candidates},
                 {"restarts", config.restarts},
                 {"fd_step_frac", config.fd_step_frac},
                 {"h_workers", config.h_workers},
                 {"budget_mode", config.budget_mode == BudgetMode::TotalCost ? "cost" : "iterations"},
                 {"budget", config.budget},
                 {"replications", config.replications},
                 {"output_dir", config.output_dir}};
  j["config_digest"] = config_digest(config);

  j["initial"] = {{"cost", result.initial.cost},
                  {"best_initial_true", result.initial.best_initial_true},
                  {"rec_x", std::vector<double>(result.initial.rec_x.data(),
                                                result.initial.rec_x.data() + result.initial.rec_x.size())},
                  {"rec_mu", result.initial.rec_mu},
                  {"true_value", result.initial.true_value}};

  nlohmann::json model;
  model["mean_constant"] = result.model.mean.constant;
  model["truth"] = kernel_block_to_json(result.model.kernel.truth_kernel());
  model["discrepancies"] = nlohmann::json::array();
  for (const BaseKernel& k : result.model.kernel.discrepancy_kernels()) {
    model["discrepancies"].push_back(kernel_block_to_json(k));
  }
  model["fidelity"] = result.model.kernel.fidelity();
  model["converged"] = result.model.converged;
  j["model"] = model;

  nlohmann::json observations = nlohmann::json::array();
  for (const Observation& o : result.initial_observations) {
    observations.push_back({{"source", o.source},
                            {"x", std::vector<double>(o.x.data(), o.x.data() + o.x.size())},
                            {"y", o.y},
                            {"noise_var", o.noise_var}});
  }
  j["initial_observations"] = observations;

  j["final"] = {{"rec_x", std::vector<double>(result.final_recommendation().data(),
                                              result.final_recommendation().data() +
                                                  result.final_recommendation().size())},
                {"true_value", result.final_true_value()}};
  j["aborted"] = result.aborted;
  j["abort_reason"] = result.abort_reason;
  j["num_records"] = result.records.size();
  return j;
}

}  // namespace misobo
