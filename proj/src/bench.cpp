/*
 * This file is part of misobo, a library for multi-information source
 * Bayesian optimization.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#include "misobo/bench.hpp"

#include <cmath>
#include <memory>
#include <utility>

#include "misobo/acquisition.hpp"
#include "misobo/ascent.hpp"
#include "misobo/expr.hpp"

namespace misobo {

double BenchmarkProblem::query(int source, const Eigen::VectorXd& x, std::uint64_t seed,
                               std::uint64_t call_index) const {
  if (source < 0 || source >= num_sources_total()) {
    throw InvalidInput("BenchmarkProblem::query: source index out of range");
  }
  Rng rng(mix_seed(seed, static_cast<std::uint64_t>(source), call_index));
  return sources[static_cast<std::size_t>(source)](x, rng);
}

double rosenbrock(const Eigen::VectorXd& x) {
  if (x.size() != 2) throw InvalidInput("rosenbrock: expects a 2-d design");
  const double a = 1.0 - x[0];
  const double b = x[1] - x[0] * x[0];
  return a * a + 100.0 * b * b;
}

double rosenbrock_oscillation(const Eigen::VectorXd& x) {
  if (x.size() != 2) throw InvalidInput("rosenbrock_oscillation: expects a 2-d design");
  return std::sin(10.0 * x[0] + 5.0 * x[1]);
}

BenchmarkProblem rosenbrock_miso(RosenbrockConfig config) {
  const bool lam = (config == RosenbrockConfig::Lam);
  const double u = lam ? 0.0 : 1.0;
  const double v = lam ? 0.1 : 2.0;
  const double truth_noise = lam ? 1e-3 : 1.0;
  const double truth_cost = lam ? 1000.0 : 50.0;

  BenchmarkProblem p;
  p.name = lam ? "rosenbrock_lam" : "rosenbrock_alt";
  p.dim = 2;
  p.box = Box::cube(2, -2.0, 2.0);
  p.sources.push_back([u](const Eigen::VectorXd& x, Rng& rng) {
    return -(rosenbrock(x) + u * rng.normal());
  });
  p.sources.push_back([v](const Eigen::VectorXd& x, Rng&) {
    return -(rosenbrock(x) + v * rosenbrock_oscillation(x));
  });
  p.cost_noise = CostNoiseModel::constant({truth_cost, 1.0}, {truth_noise, 1e-6});
  p.true_objective = [](const Eigen::VectorXd& x) { return -rosenbrock(x); };
  p.known_optimum = {(Eigen::VectorXd(2) << 1.0, 1.0).finished(), 0.0};
  return p;
}

namespace {

struct AtoSurface {
  std::vector<Eigen::VectorXd> centers;
  std::vector<double> widths;   // isotropic per bump
  std::vector<double> weights;
  double scale = 1.0;

  double unscaled(const Eigen::VectorXd& x) const {
    double v = 0.0;
    for (std::size_t k = 0; k < centers.size(); ++k) {
      const double r2 = (x - centers[k]).squaredNorm();
      v += weights[k] * std::exp(-0.5 * r2 / (widths[k] * widths[k]));
    }
    return v;
  }

  double operator()(const Eigen::VectorXd& x) const { return scale * unscaled(x); }
};

struct AtoBias {
  double offset = 6.0;
  std::vector<Eigen::VectorXd> freqs;
  std::vector<double> phases;
  double amplitude = 0.0;

  double operator()(const Eigen::VectorXd& x) const {
    double v = offset;
    for (std::size_t k = 0; k < freqs.size(); ++k) {
      v += amplitude * std::cos(freqs[k].dot(x) + phases[k]);
    }
    return v;
  }
};

AtoSurface build_ato_surface(std::uint64_t seed) {
  constexpr int kDim = 8;
  constexpr int kBumps = 3;
  constexpr double kPeak = 120.0;
  const Box box = Box::cube(kDim, 0.0, 20.0);

  AtoSurface surface;
  Rng rng(mix_seed(seed, 0xa70));
  for (int k = 0; k < kBumps; ++k) {
    Eigen::VectorXd c(kDim);
    for (int i = 0; i < kDim; ++i) c[i] = rng.uniform(3.0, 17.0);
    surface.centers.push_back(std::move(c));
    surface.widths.push_back(rng.uniform(8.0, 12.0));
    surface.weights.push_back(rng.uniform(0.6, 1.0));
  }

  // Locate the maximum (ascent from each bump center plus a space-filling
  // scan) and rescale so the peak sits at kPeak.
  const Objective objective = [&surface](const Eigen::VectorXd& x) { return surface.unscaled(x); };
  double best = -std::numeric_limits<double>::infinity();
  for (const Eigen::VectorXd& c : surface.centers) {
    const AscentResult r = maximize_in_box(objective, box, c);
    if (r.value > best) best = r.value;
  }
  for (const Eigen::VectorXd& x : latin_hypercube_points(4096, box, mix_seed(seed, 0xa71))) {
    const AscentResult r = maximize_in_box(objective, box, x, {.max_iterations = 20});
    if (r.value > best) best = r.value;
  }
  surface.scale = kPeak / best;
  return surface;
}

AtoBias build_ato_bias(std::uint64_t seed) {
  constexpr int kDim = 8;
  constexpr int kWaves = 8;
  constexpr double kVariance = 200.0;

  AtoBias bias;
  bias.amplitude = std::sqrt(2.0 * kVariance / kWaves);
  Rng rng(mix_seed(seed, 0xb1a5));
  for (int k = 0; k < kWaves; ++k) {
    Eigen::VectorXd w(kDim);
    for (int i = 0; i < kDim; ++i) w[i] = rng.uniform(0.1, 0.5);
    bias.freqs.push_back(std::move(w));
    bias.phases.push_back(rng.uniform(0.0, 2.0 * 3.14159265358979323846));
  }
  return bias;
}

}  // namespace

double ato_bias_field(const Eigen::VectorXd& x, std::uint64_t seed) {
  static thread_local std::unique_ptr<AtoBias> cached;
  static thread_local std::uint64_t cached_seed = 0;
  if (!cached || cached_seed != seed) {
    cached = std::make_unique<AtoBias>(build_ato_bias(seed));
    cached_seed = seed;
  }
  return (*cached)(x);
}

BenchmarkProblem ato_synthetic(std::uint64_t seed) {
  auto surface = std::make_shared<AtoSurface>(build_ato_surface(seed));
  auto bias = std::make_shared<AtoBias>(build_ato_bias(seed));

  BenchmarkProblem p;
  p.name = "ato";
  p.dim = 8;
  p.box = Box::cube(8, 0.0, 20.0);
  p.sources.push_back([surface](const Eigen::VectorXd& x, Rng& rng) {
    return (*surface)(x) + rng.normal(0.0, std::sqrt(0.056));
  });
  p.sources.push_back([surface, bias](const Eigen::VectorXd& x, Rng& rng) {
    return (*surface)(x) + (*bias)(x) + rng.normal(0.0, std::sqrt(2.944));
  });
  p.sources.push_back([surface](const Eigen::VectorXd& x, Rng& rng) {
    return (*surface)(x) + rng.normal(0.0, std::sqrt(0.332));
  });
  p.cost_noise = CostNoiseModel::constant({17.1, 0.5, 3.9}, {0.056, 2.944, 0.332});
  p.true_objective = [surface](const Eigen::VectorXd& x) { return (*surface)(x); };

  const Objective objective = [surface](const Eigen::VectorXd& x) { return (*surface)(x); };
  double best = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd arg;
  for (const Eigen::VectorXd& c : surface->centers) {
    const AscentResult r = maximize_in_box(objective, p.box, c);
    if (r.value > best) {
      best = r.value;
      arg = r.x;
    }
  }
  p.known_optimum = {arg, best};
  return p;
}

BenchmarkProblem two_source_analytic(int dim) {
  if (dim < 1) throw InvalidInput("two_source_analytic: dimension must be positive");
  BenchmarkProblem p;
  p.name = "two_source_analytic";
  p.dim = dim;
  p.box = Box::cube(dim, -1.0, 1.0);
  p.sources.push_back([](const Eigen::VectorXd& x, Rng&) { return -x.squaredNorm(); });
  p.sources.push_back([](const Eigen::VectorXd& x, Rng&) {
    return -x.squaredNorm() + 0.05 * std::cos(x.sum());
  });
  p.cost_noise = CostNoiseModel::constant({1.0, 1.0}, {0.0, 0.0});
  p.true_objective = [](const Eigen::VectorXd& x) { return -x.squaredNorm(); };
  p.known_optimum = {Eigen::VectorXd::Zero(dim), 0.0};
  return p;
}

BenchmarkProblem make_custom_problem(const CustomProblemSpec& spec) {
  if (spec.dim < 1) throw ConfigError("custom problem: dimension must be positive");
  if (spec.source_exprs.empty()) throw ConfigError("custom problem: at least one source expression required");
  if (spec.costs.size() != spec.source_exprs.size() || spec.noises.size() != spec.source_exprs.size()) {
    throw ConfigError("custom problem: costs and noise lists must match the number of sources");
  }
  BenchmarkProblem p;
  p.name = spec.name;
  p.dim = spec.dim;
  p.box = Box(spec.box_lower, spec.box_upper);
  if (p.box.dim() != spec.dim) throw ConfigError("custom problem: box dimension mismatch");

  for (std::size_t l = 0; l < spec.source_exprs.size(); ++l) {
    auto expr = std::make_shared<Expression>(Expression::parse(spec.source_exprs[l], spec.dim));
    const double noise_sd = std::sqrt(spec.noises[l]);
    p.sources.push_back([expr, noise_sd](const Eigen::VectorXd& x, Rng& rng) {
      double y = (*expr)(x);
      if (noise_sd > 0.0) y += noise_sd * rng.normal();
      return y;
    });
  }
  p.cost_noise = CostNoiseModel::constant(spec.costs, spec.noises);

  const std::string truth_text =
      spec.true_objective_expr.empty() ? spec.source_exprs[0] : spec.true_objective_expr;
  auto truth = std::make_shared<Expression>(Expression::parse(truth_text, spec.dim));
  p.true_objective = [truth](const Eigen::VectorXd& x) { return (*truth)(x); };
  return p;
}

}  // namespace misobo
