/*
 * This file is part of misobo, a library for multi-information source
 * Bayesian optimization.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "misobo/gp.hpp"
#include "misobo/rng.hpp"
#include "oracles.hpp"

using namespace misobo;

namespace {

Eigen::VectorXd vec1(double x) {
  Eigen::VectorXd v(1);
  v[0] = x;
  return v;
}

MisoKernel random_kernel(Rng& rng, int dim, int m,
                         KernelFamily family = KernelFamily::SquaredExponential) {
  const auto base = [&](double sv_lo, double sv_hi) {
    Eigen::VectorXd ls(dim);
    for (int i = 0; i < dim; ++i) ls[i] = rng.uniform(0.3, 1.8);
    return BaseKernel(family, ls, rng.uniform(sv_lo, sv_hi));
  };
  std::vector<BaseKernel> discrepancies;
  for (int l = 0; l < m; ++l) discrepancies.push_back(base(0.05, 0.6));
  return MisoKernel(base(0.5, 2.0), discrepancies);
}

std::vector<Observation> random_observations(Rng& rng, int n, int dim, int m,
                                             double noise_lo = 0.001, double noise_hi = 0.1) {
  std::vector<Observation> obs;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd x(dim);
    for (int j = 0; j < dim; ++j) x[j] = rng.uniform(-1.5, 1.5);
    obs.emplace_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(m + 1))), x,
                     rng.normal(), rng.uniform(noise_lo, noise_hi));
  }
  return obs;
}

}  // namespace

TEST_CASE("prior recovery with no observations") {
  Rng rng(1);
  const MisoKernel kernel = random_kernel(rng, 2, 2);
  const MeanFunction mean{0.7};
  const PosteriorState state(kernel, mean);
  const AugmentedPoint p(1, (Eigen::VectorXd(2) << 0.2, -0.4).finished());
  const AugmentedPoint q(0, (Eigen::VectorXd(2) << 1.0, 0.3).finished());
  CHECK(state.posterior_mean(p) == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(state.posterior_cov(p, q) == doctest::Approx(kernel(p, q)).epsilon(1e-15));
  CHECK(state.posterior_var(p) == doctest::Approx(kernel(p, p)).epsilon(1e-15));
}

TEST_CASE("noise-free observation is interpolated exactly with jitter disabled") {
  Rng rng(2);
  const MisoKernel kernel = random_kernel(rng, 1, 1);
  const Observation obs(1, vec1(0.4), 1.234, 0.0);
  const PosteriorState state(kernel, MeanFunction{0.0}, {obs}, /*jitter=*/0.0);
  CHECK(state.posterior_mean(obs.point()) == doctest::Approx(1.234).epsilon(1e-10));
  CHECK(state.posterior_var(obs.point()) <= 1e-8);
}

TEST_CASE("posterior mean and covariance match the dense oracle") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const KernelFamily family =
        (trial % 2 == 0) ? KernelFamily::SquaredExponential : KernelFamily::Matern52;
    const int dim = 1 + static_cast<int>(rng.below(2));
    const int m = 1 + static_cast<int>(rng.below(3));
    const MisoKernel kernel = random_kernel(rng, dim, m, family);
    const MeanFunction mean{rng.uniform(-1.0, 1.0)};
    const auto obs = random_observations(rng, 3 + static_cast<int>(rng.below(4)), dim, m);
    const PosteriorState state(kernel, mean, obs);
    const oracles::DenseGp dense(kernel, mean, obs);
    for (int t = 0; t < 4; ++t) {
      Eigen::VectorXd x(dim), y(dim);
      for (int j = 0; j < dim; ++j) {
        x[j] = rng.uniform(-1.5, 1.5);
        y[j] = rng.uniform(-1.5, 1.5);
      }
      const AugmentedPoint p(static_cast<int>(rng.below(static_cast<std::uint64_t>(m + 1))), x);
      const AugmentedPoint q(static_cast<int>(rng.below(static_cast<std::uint64_t>(m + 1))), y);
      CHECK(state.posterior_mean(p) == doctest::Approx(dense.mean_at(p)).epsilon(1e-8));
      CHECK(state.posterior_cov(p, q) == doctest::Approx(dense.cov_at(p, q)).epsilon(1e-8));
      CHECK(state.posterior_cov(p, q) == doctest::Approx(state.posterior_cov(q, p)).epsilon(1e-10));
    }
  }
}

TEST_CASE("cholesky factor reconstructs the noisy gram matrix") {
  Rng rng(4);
  const MisoKernel kernel = random_kernel(rng, 2, 2);
  const auto obs = random_observations(rng, 8, 2, 2);
  PosteriorState state(kernel, MeanFunction{0.0}, obs);
  for (int extra = 0; extra < 3; ++extra) {
    state = state.update(random_observations(rng, 1, 2, 2)[0]);
  }
  std::vector<AugmentedPoint> pts;
  std::vector<double> noise;
  for (const Observation& o : state.observations()) {
    pts.push_back(o.point());
    noise.push_back(o.noise_var);
  }
  const Eigen::MatrixXd expected = state.kernel().gram(pts, noise, state.jitter());
  const Eigen::MatrixXd actual =
      state.chol_lower() * state.chol_lower().transpose();
  const double scale = expected.diagonal().maxCoeff();
  CHECK((actual - expected).cwiseAbs().maxCoeff() <= 1e-8 * scale);
}

TEST_CASE("incremental update equals a from-scratch rebuild") {
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const int m = 1 + static_cast<int>(rng.below(2));
    const MisoKernel kernel = random_kernel(rng, 1, m);
    const MeanFunction mean{rng.uniform(-0.5, 0.5)};
    const auto seq = random_observations(rng, 6, 1, m);
    PosteriorState incremental(kernel, mean, {seq[0], seq[1]});
    std::vector<Observation> all = {seq[0], seq[1]};
    for (std::size_t i = 2; i < seq.size(); ++i) {
      incremental = incremental.update(seq[i]);
      all.push_back(seq[i]);
    }
    const PosteriorState rebuilt(kernel, mean, all);
    for (int t = 0; t < 5; ++t) {
      const AugmentedPoint p(static_cast<int>(rng.below(static_cast<std::uint64_t>(m + 1))),
                             vec1(rng.uniform(-1.5, 1.5)));
      CHECK(incremental.posterior_mean(p) ==
            doctest::Approx(rebuilt.posterior_mean(p)).epsilon(1e-8));
      CHECK(incremental.posterior_var(p) ==
            doctest::Approx(rebuilt.posterior_var(p)).epsilon(1e-8));
    }
  }
}

TEST_CASE("updates far from a query point barely move its mean") {
  Rng rng(6);
  Eigen::VectorXd ls(1);
  ls[0] = 0.2;
  const MisoKernel kernel(BaseKernel(KernelFamily::SquaredExponential, ls, 1.0),
                          {BaseKernel(KernelFamily::SquaredExponential, ls, 0.3)});
  const PosteriorState state(kernel, MeanFunction{0.0},
                             {Observation(0, vec1(-3.0), 0.5, 0.01)});
  const AugmentedPoint far(0, vec1(3.0));  // 30 length scales away
  const double before = state.posterior_mean(far);
  const PosteriorState after = state.update(Observation(0, vec1(-2.9), 0.7, 0.01));
  CHECK(std::fabs(after.posterior_mean(far) - before) < 1e-6);
}

TEST_CASE("observing a biased source shrinks truth-source variance") {
  Rng rng(7);
  const MisoKernel kernel = random_kernel(rng, 1, 1);
  const PosteriorState state(kernel, MeanFunction{0.0});
  const Eigen::VectorXd x = vec1(0.3);
  REQUIRE(kernel(AugmentedPoint(0, x), AugmentedPoint(0, x)) > 0.0);
  const double before = state.posterior_var(AugmentedPoint(0, x));
  const PosteriorState after = state.update(Observation(1, x, 0.2, 1e-6));
  const double after_var = after.posterior_var(AugmentedPoint(0, x));
  CHECK(after_var < before);  // one new biased sample still informs the truth
}

TEST_CASE("posterior is exchangeable in observation order") {
  Rng rng(8);
  const MisoKernel kernel = random_kernel(rng, 1, 2);
  const MeanFunction mean{0.1};
  auto obs = random_observations(rng, 7, 1, 2);
  const PosteriorState a(kernel, mean, obs);
  std::reverse(obs.begin(), obs.end());
  std::swap(obs[2], obs[5]);
  const PosteriorState b(kernel, mean, obs);
  for (int t = 0; t < 6; ++t) {
    const AugmentedPoint p(static_cast<int>(rng.below(3)), vec1(rng.uniform(-1.5, 1.5)));
    CHECK(a.posterior_mean(p) == doctest::Approx(b.posterior_mean(p)).epsilon(1e-8));
    CHECK(a.posterior_var(p) == doctest::Approx(b.posterior_var(p)).epsilon(1e-8));
  }
}

TEST_CASE("variance never grows under an update") {
  Rng rng(9);
  const MisoKernel kernel = random_kernel(rng, 2, 2);
  PosteriorState state(kernel, MeanFunction{0.0},
                       random_observations(rng, 4, 2, 2));
  std::vector<AugmentedPoint> probes;
  for (int t = 0; t < 10; ++t) {
    Eigen::VectorXd x(2);
    x[0] = rng.uniform(-1.5, 1.5);
    x[1] = rng.uniform(-1.5, 1.5);
    probes.emplace_back(static_cast<int>(rng.below(3)), x);
  }
  for (int step = 0; step < 5; ++step) {
    std::vector<double> before;
    for (const AugmentedPoint& p : probes) before.push_back(state.posterior_var(p));
    state = state.update(random_observations(rng, 1, 2, 2)[0]);
    for (std::size_t i = 0; i < probes.size(); ++i) {
      CHECK(state.posterior_var(probes[i]) <= before[i] + 1e-8);
    }
  }
}

TEST_CASE("update failure names the offending observation") {
  Rng rng(10);
  const MisoKernel kernel = random_kernel(rng, 1, 1);
  const Observation first(0, vec1(0.5), 1.0, 0.0);
  const PosteriorState state(kernel, MeanFunction{0.0}, {first}, /*jitter=*/0.0);
  // duplicating a noise-free row makes the extension singular
  try {
    state.update(Observation(0, vec1(0.5), 1.0, 0.0));
    FAIL("expected a conditioning error");
  } catch (const ConditioningError& e) {
    const std::string what = e.what();
    CHECK(what.find("source 0") != std::string::npos);
    CHECK(what.find("0.5") != std::string::npos);
  }
}

TEST_CASE("sigma_tilde: uncorrelated candidate gives a zero vector") {
  // truth kernel with negligible variance, so distinct sources share nothing
  Eigen::VectorXd ls(1);
  ls[0] = 1.0;
  const MisoKernel kernel(BaseKernel(KernelFamily::SquaredExponential, ls, 1e-300),
                          {BaseKernel(KernelFamily::SquaredExponential, ls, 1.0),
                           BaseKernel(KernelFamily::SquaredExponential, ls, 1.0)});
  const PosteriorState state(kernel, MeanFunction{0.0});
  const std::vector<AugmentedPoint> targets = {AugmentedPoint(0, vec1(0.0)),
                                               AugmentedPoint(0, vec1(0.5))};
  const Eigen::VectorXd st = state.sigma_tilde(AugmentedPoint(1, vec1(0.2)), 0.01, targets);
  CHECK(st.cwiseAbs().maxCoeff() <= 1e-30);
}

TEST_CASE("sigma_tilde: candidate as its own target with zero noise") {
  Rng rng(11);
  const MisoKernel kernel = random_kernel(rng, 1, 1);
  const PosteriorState state(kernel, MeanFunction{0.0},
                             random_observations(rng, 3, 1, 1));
  const AugmentedPoint cand(1, vec1(0.7));
  const std::vector<AugmentedPoint> targets = {cand};
  const Eigen::VectorXd st = state.sigma_tilde(cand, 0.0, targets);
  CHECK(st[0] == doctest::Approx(std::sqrt(state.posterior_var(cand))).epsilon(1e-9));
}

TEST_CASE("sigma_tilde rejects empty targets and degenerate variance") {
  Rng rng(12);
  const MisoKernel kernel = random_kernel(rng, 1, 1);
  const PosteriorState state(kernel, MeanFunction{0.0}, {}, 0.0);
  CHECK_THROWS_AS(state.sigma_tilde(AugmentedPoint(0, vec1(0.0)), 0.0, {}), InvalidInput);
  // noise-free observation at the candidate and zero candidate noise
  const PosteriorState observed(kernel, MeanFunction{0.0},
                                {Observation(0, vec1(0.0), 1.0, 0.0)}, /*jitter=*/0.0);
  const std::vector<AugmentedPoint> targets = {AugmentedPoint(0, vec1(0.4))};
  CHECK_THROWS_AS(observed.sigma_tilde(AugmentedPoint(0, vec1(0.0)), 0.0, targets),
                  ConditioningError);
}

TEST_CASE("sigma_tilde matches the resampling oracle and the one-step mean law") {
  Rng rng(13);
  const MisoKernel kernel = random_kernel(rng, 1, 1);
  const MeanFunction mean{0.2};
  const auto obs = random_observations(rng, 4, 1, 1);
  const PosteriorState state(kernel, mean, obs);
  const oracles::DenseGp dense(kernel, mean, obs);

  const AugmentedPoint cand(1, vec1(0.25));
  const double lambda = 0.3;
  const std::vector<AugmentedPoint> targets = {AugmentedPoint(0, vec1(-0.5)),
                                               AugmentedPoint(0, vec1(0.1)),
                                               AugmentedPoint(0, vec1(0.8))};
  const Eigen::VectorXd st = state.sigma_tilde(cand, lambda, targets);

  const double mu_c = dense.mean_at(cand);
  const double sd_c = std::sqrt(lambda + std::max(0.0, dense.cov_at(cand, cand)));
  const int draws = 100000;
  std::vector<double> sum(targets.size(), 0.0), sum_sq(targets.size(), 0.0);
  Rng draw_rng(99);
  for (int k = 0; k < draws; ++k) {
    const double y = mu_c + sd_c * draw_rng.normal();
    const oracles::DenseGp next = dense.with(Observation(cand.source, cand.x, y, lambda));
    for (std::size_t t = 0; t < targets.size(); ++t) {
      const double m = next.mean_at(targets[t]);
      sum[t] += m;
      sum_sq[t] += m * m;
    }
  }
  for (std::size_t t = 0; t < targets.size(); ++t) {
    const double mean_of_means = sum[t] / draws;
    const double var_of_means =
        std::max(0.0, (sum_sq[t] - draws * mean_of_means * mean_of_means) / (draws - 1.0));
    const double sample_std = std::sqrt(var_of_means);
    // sample std of new means ~= |sigma_tilde|, se of a sample std ~ s/sqrt(2N)
    const double se_std = std::max(std::fabs(st[t]), 1e-12) / std::sqrt(2.0 * draws);
    CHECK(std::fabs(sample_std - std::fabs(st[t])) <= 3.0 * se_std + 1e-12);
    // martingale: the expected one-step mean is the current mean
    const double current = dense.mean_at(targets[t]);
    const double se_mean = sample_std / std::sqrt(static_cast<double>(draws));
    CHECK(std::fabs(mean_of_means - current) <= 3.0 * se_mean + 1e-12);
  }
}

TEST_CASE("one-step lookahead agrees with the direct sigma_tilde path") {
  Rng rng(14);
  const MisoKernel kernel = random_kernel(rng, 2, 2);
  const PosteriorState state(kernel, MeanFunction{0.0},
                             random_observations(rng, 5, 2, 2));
  std::vector<AugmentedPoint> targets;
  for (int t = 0; t < 4; ++t) {
    Eigen::VectorXd x(2);
    x[0] = rng.uniform(-1.0, 1.0);
    x[1] = rng.uniform(-1.0, 1.0);
    targets.emplace_back(0, x);
  }
  const OneStepLookahead lookahead(state, targets);
  for (int t = 0; t < 5; ++t) {
    Eigen::VectorXd x(2);
    x[0] = rng.uniform(-1.0, 1.0);
    x[1] = rng.uniform(-1.0, 1.0);
    const AugmentedPoint cand(static_cast<int>(rng.below(3)), x);
    const Eigen::VectorXd a = lookahead.sigma_tilde(cand, 0.05);
    const Eigen::VectorXd b = state.sigma_tilde(cand, 0.05, targets);
    CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK(lookahead.target_means()[t % 4] ==
          doctest::Approx(state.posterior_mean(targets[static_cast<std::size_t>(t % 4)])).epsilon(1e-12));
  }
}
