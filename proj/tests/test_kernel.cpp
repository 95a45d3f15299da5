/*
 * This file is part of misobo, a library for multi-information source
 * Bayesian optimization.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "misobo/kernel.hpp"
#include "misobo/rng.hpp"
#include "oracles.hpp"

using namespace misobo;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

BaseKernel random_base(Rng& rng, int dim, KernelFamily family) {
  Eigen::VectorXd ls(dim);
  for (int i = 0; i < dim; ++i) ls[i] = rng.uniform(0.2, 2.5);
  return BaseKernel(family, ls, rng.uniform(0.2, 3.0));
}

std::vector<AugmentedPoint> random_points(Rng& rng, int n, int dim, int max_source) {
  std::vector<AugmentedPoint> pts;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd x(dim);
    for (int j = 0; j < dim; ++j) x[j] = rng.uniform(-2.0, 2.0);
    pts.emplace_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(max_source + 1))), x);
  }
  return pts;
}

}  // namespace

TEST_CASE("squared exponential evaluates the standard form") {
  const BaseKernel k2(KernelFamily::SquaredExponential, vec({1.0, 1.0}), 1.0);
  CHECK(k2(vec({0.3, -0.7}), vec({0.3, -0.7})) == doctest::Approx(1.0).epsilon(1e-15));

  const BaseKernel k1(KernelFamily::SquaredExponential, vec({1.0}), 2.0);
  // sv * exp(-|x-x'|^2 / (2 ls^2)) at x=0, x'=2
  CHECK(k1(vec({0.0}), vec({2.0})) == doctest::Approx(2.0 * std::exp(-2.0)).epsilon(1e-14));
}

TEST_CASE("matern52 is symmetric and peaks at the signal variance") {
  Rng rng(3);
  const BaseKernel k = random_base(rng, 3, KernelFamily::Matern52);
  for (int t = 0; t < 100; ++t) {
    Eigen::VectorXd x(3), y(3);
    for (int i = 0; i < 3; ++i) {
      x[i] = rng.uniform(-3.0, 3.0);
      y[i] = rng.uniform(-3.0, 3.0);
    }
    CHECK(k(x, y) == doctest::Approx(k(y, x)).epsilon(1e-15));
    CHECK(k(x, y) <= k.signal_variance() + 1e-15);
  }
  Eigen::VectorXd x = vec({0.1, 0.2, 0.3});
  CHECK(k(x, x) == doctest::Approx(k.signal_variance()).epsilon(1e-15));
}

TEST_CASE("base kernel rejects bad hyperparameters and dimension mismatch") {
  CHECK_THROWS_AS(BaseKernel(KernelFamily::SquaredExponential, vec({1.0, -1.0}), 1.0), InvalidInput);
  CHECK_THROWS_AS(BaseKernel(KernelFamily::SquaredExponential, vec({1.0}), 0.0), InvalidInput);
  CHECK_THROWS_AS(BaseKernel(KernelFamily::SquaredExponential, Eigen::VectorXd(), 1.0), InvalidInput);
  const BaseKernel k(KernelFamily::SquaredExponential, vec({1.0, 1.0}), 1.0);
  CHECK_THROWS_AS(k(vec({0.0}), vec({0.0, 1.0})), InvalidInput);
}

TEST_CASE("hyperparameters are stored in log space and round-trip") {
  const BaseKernel k(KernelFamily::Matern52, vec({0.5, 3.0}), 2.5);
  CHECK(k.log_length_scales()[0] == doctest::Approx(std::log(0.5)).epsilon(1e-15));
  CHECK(k.length_scales()[1] == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(k.log_signal_variance() == doctest::Approx(std::log(2.5)).epsilon(1e-15));
  const BaseKernel k2 = BaseKernel::from_log(KernelFamily::Matern52, k.log_length_scales(),
                                             k.log_signal_variance());
  CHECK(k2(vec({0.1, 0.4}), vec({-1.0, 2.0})) ==
        doctest::Approx(k(vec({0.1, 0.4}), vec({-1.0, 2.0}))).epsilon(1e-14));
}

TEST_CASE("miso kernel: truth source carries no discrepancy") {
  Rng rng(11);
  const MisoKernel k(random_base(rng, 2, KernelFamily::SquaredExponential),
                     {random_base(rng, 2, KernelFamily::SquaredExponential),
                      random_base(rng, 2, KernelFamily::SquaredExponential)});
  const Eigen::VectorXd x = vec({0.4, -1.1});
  const Eigen::VectorXd y = vec({-0.2, 0.9});
  CHECK(k(AugmentedPoint(0, x), AugmentedPoint(0, y)) ==
        doctest::Approx(k.truth_kernel()(x, y)).epsilon(1e-15));
  // cross-source entries in the independent model carry only the truth term
  CHECK(k(AugmentedPoint(1, x), AugmentedPoint(2, y)) ==
        doctest::Approx(k.truth_kernel()(x, y)).epsilon(1e-15));
  // symmetry across argument order
  CHECK(k(AugmentedPoint(1, x), AugmentedPoint(1, y)) ==
        doctest::Approx(k(AugmentedPoint(1, y), AugmentedPoint(1, x))).epsilon(1e-15));
  CHECK_THROWS_AS(k(AugmentedPoint(3, x), AugmentedPoint(0, y)), InvalidInput);
  CHECK_THROWS_AS(k(AugmentedPoint(-1, x), AugmentedPoint(0, y)), InvalidInput);
}

TEST_CASE("correlated model adds the shared group term for same-group biased sources") {
  Rng rng(12);
  const BaseKernel truth = random_base(rng, 2, KernelFamily::SquaredExponential);
  const BaseKernel d1 = random_base(rng, 2, KernelFamily::SquaredExponential);
  const BaseKernel d2 = random_base(rng, 2, KernelFamily::SquaredExponential);
  const BaseKernel shared = random_base(rng, 2, KernelFamily::SquaredExponential);
  // sources 1 and 2 share group 1; the truth source sits alone in group 0
  const MisoKernel k(truth, {d1, d2}, {}, {0, 1, 1}, {random_base(rng, 2, KernelFamily::SquaredExponential), shared});
  const Eigen::VectorXd x = vec({0.3, 0.1});
  const Eigen::VectorXd y = vec({-0.5, 0.8});
  CHECK(k(AugmentedPoint(1, x), AugmentedPoint(2, y)) ==
        doctest::Approx(truth(x, y) + shared(x, y)).epsilon(1e-14));
  // same source: truth + group + own discrepancy
  CHECK(k(AugmentedPoint(1, x), AugmentedPoint(1, y)) ==
        doctest::Approx(truth(x, y) + shared(x, y) + d1(x, y)).epsilon(1e-14));
  // the truth source still reduces to the truth kernel exactly
  CHECK(k(AugmentedPoint(0, x), AugmentedPoint(0, y)) == doctest::Approx(truth(x, y)).epsilon(1e-15));
  CHECK(k(AugmentedPoint(0, x), AugmentedPoint(1, y)) == doctest::Approx(truth(x, y)).epsilon(1e-15));
}

TEST_CASE("correlated model reduces to the independent model") {
  Rng rng(13);
  const BaseKernel truth = random_base(rng, 2, KernelFamily::SquaredExponential);
  const BaseKernel d1 = random_base(rng, 2, KernelFamily::SquaredExponential);
  const BaseKernel d2 = random_base(rng, 2, KernelFamily::SquaredExponential);
  const MisoKernel independent(truth, {d1, d2});
  // singleton groups with (structurally positive but) negligible variance
  const BaseKernel zero(KernelFamily::SquaredExponential, vec({1.0, 1.0}), 1e-300);
  const MisoKernel correlated(truth, {d1, d2}, {}, {0, 1, 2}, {zero, zero, zero});
  for (int t = 0; t < 50; ++t) {
    const auto pts = random_points(rng, 2, 2, 2);
    CHECK(correlated(pts[0], pts[1]) ==
          doctest::Approx(independent(pts[0], pts[1])).epsilon(1e-12));
  }
}

TEST_CASE("fidelity coefficients scale only same-source discrepancy terms") {
  Rng rng(14);
  const BaseKernel truth = random_base(rng, 2, KernelFamily::SquaredExponential);
  const BaseKernel d1 = random_base(rng, 2, KernelFamily::SquaredExponential);
  const BaseKernel d2 = random_base(rng, 2, KernelFamily::SquaredExponential);
  const Eigen::VectorXd x = vec({0.2, 0.5});
  double prev_diag = 0.0;
  for (double alpha : {0.5, 1.0, 2.0, 4.0}) {
    const MisoKernel k(truth, {d1, d2}, {alpha, 1.0});
    const double diag = k(AugmentedPoint(1, x), AugmentedPoint(1, x));
    CHECK(diag >= prev_diag);  // larger alpha, larger own-source variance
    prev_diag = diag;
    // cross-source entries do not move with alpha
    CHECK(k(AugmentedPoint(1, x), AugmentedPoint(2, x)) ==
          doctest::Approx(truth(x, x)).epsilon(1e-15));
    CHECK(k(AugmentedPoint(1, x), AugmentedPoint(0, x)) ==
          doctest::Approx(truth(x, x)).epsilon(1e-15));
  }
  CHECK_THROWS_AS(MisoKernel(truth, {d1, d2}, {1.0}), InvalidInput);
  CHECK_THROWS_AS(MisoKernel(truth, {d1, d2}, {1.0, -2.0}), InvalidInput);
}

TEST_CASE("cross-source entries are independent of which sources are involved") {
  Rng rng(15);
  const BaseKernel truth = random_base(rng, 2, KernelFamily::SquaredExponential);
  const MisoKernel k(truth, {random_base(rng, 2, KernelFamily::SquaredExponential),
                             random_base(rng, 2, KernelFamily::SquaredExponential),
                             random_base(rng, 2, KernelFamily::SquaredExponential)});
  const Eigen::VectorXd x = vec({1.4, -0.3});
  const double reference = k(AugmentedPoint(1, x), AugmentedPoint(2, x));
  CHECK(reference == doctest::Approx(truth(x, x)).epsilon(1e-15));
  CHECK(k(AugmentedPoint(3, x), AugmentedPoint(1, x)) == doctest::Approx(reference).epsilon(1e-15));
  CHECK(k(AugmentedPoint(2, x), AugmentedPoint(3, x)) == doctest::Approx(reference).epsilon(1e-15));
}

TEST_CASE("gram matrix shape, jitter policy and PSD") {
  Rng rng(16);
  const MisoKernel k(random_base(rng, 2, KernelFamily::SquaredExponential),
                     {random_base(rng, 2, KernelFamily::SquaredExponential)});

  SUBCASE("empty input gives an empty matrix") {
    const Eigen::MatrixXd g = k.gram({}, {});
    CHECK(g.rows() == 0);
    CHECK(g.cols() == 0);
  }

  SUBCASE("single point with zero noise and jitter disabled") {
    const std::vector<AugmentedPoint> pts = {AugmentedPoint(1, vec({0.5, 0.5}))};
    const std::vector<double> noise = {0.0};
    const Eigen::MatrixXd g = k.gram(pts, noise, 0.0);
    CHECK(g.rows() == 1);
    CHECK(g(0, 0) == doctest::Approx(k(pts[0], pts[0])).epsilon(1e-15));
  }

  SUBCASE("zero noise receives the jitter, positive noise does not") {
    const std::vector<AugmentedPoint> pts = {AugmentedPoint(0, vec({0.0, 0.0})),
                                             AugmentedPoint(0, vec({1.0, 1.0}))};
    const std::vector<double> noise = {0.0, 0.25};
    const Eigen::MatrixXd g = k.gram(pts, noise);
    CHECK(g(0, 0) == doctest::Approx(k(pts[0], pts[0]) + 1e-6).epsilon(1e-15));
    CHECK(g(1, 1) == doctest::Approx(k(pts[1], pts[1]) + 0.25).epsilon(1e-15));
  }

  SUBCASE("ten random augmented points are PSD") {
    const auto pts = random_points(rng, 10, 2, 1);
    const std::vector<double> noise(10, 0.0);
    const Eigen::MatrixXd g = k.gram(pts, noise, 0.0);
    CHECK(oracles::min_eigenvalue(g) >= -1e-8);
    CHECK((g - g.transpose()).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("noise validation") {
    const std::vector<AugmentedPoint> pts = {AugmentedPoint(0, vec({0.0, 0.0}))};
    const std::vector<double> negative = {-1.0};
    CHECK_THROWS_AS(k.gram(pts, negative), InvalidInput);
    const std::vector<double> wrong_len = {0.0, 0.0};
    CHECK_THROWS_AS(k.gram(pts, wrong_len), InvalidInput);
  }
}

TEST_CASE("PSD property over random configurations and both families") {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const KernelFamily family =
        (trial % 2 == 0) ? KernelFamily::SquaredExponential : KernelFamily::Matern52;
    const int dim = 1 + static_cast<int>(rng.below(3));
    const int m = 1 + static_cast<int>(rng.below(3));
    std::vector<BaseKernel> discrepancies;
    for (int l = 0; l < m; ++l) discrepancies.push_back(random_base(rng, dim, family));
    std::vector<double> fidelity;
    for (int l = 0; l < m; ++l) fidelity.push_back(rng.uniform(0.5, 3.0));
    const MisoKernel k(random_base(rng, dim, family), discrepancies, fidelity);
    const int n = 5 + static_cast<int>(rng.below(46));
    const auto pts = random_points(rng, n, dim, m);
    const std::vector<double> noise(static_cast<std::size_t>(n), 0.0);
    CHECK(oracles::min_eigenvalue(k.gram(pts, noise, 0.0)) >= -1e-8);
  }
}
