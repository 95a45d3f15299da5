/*
 * This file is part of misobo, a library for multi-information source
 * Bayesian optimization.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#include "misobo/gp.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <sstream>
#include <utility>

namespace misobo {

namespace {

std::string describe(const Observation& obs) {
  std::ostringstream out;
  out << "source " << obs.source << ", x = [";
  for (Eigen::Index i = 0; i < obs.x.size(); ++i) {
    if (i > 0) out << ", ";
    out << obs.x[i];
  }
  out << "]";
  return out.str();
}

}  // namespace

PosteriorState::PosteriorState(MisoKernel kernel, MeanFunction mean,
                               std::vector<Observation> observations, double jitter)
    : kernel_(std::move(kernel)), mean_(std::move(mean)), obs_(std::move(observations)),
      jitter_(jitter) {
  if (jitter_ < 0.0) throw InvalidInput("PosteriorState: jitter must be nonnegative");
  factorize();
}

void PosteriorState::factorize() {
  const Eigen::Index n = static_cast<Eigen::Index>(obs_.size());
  resid_.resize(n);
  std::vector<AugmentedPoint> pts;
  std::vector<double> noise;
  pts.reserve(obs_.size());
  noise.reserve(obs_.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const Observation& o = obs_[static_cast<std::size_t>(i)];
    pts.push_back(o.point());
    noise.push_back(o.noise_var);
    resid_[i] = o.y - mean_(o.point());
  }
  if (n == 0) {
    chol_.resize(0, 0);
    alpha_.resize(0);
    return;
  }
  const Eigen::MatrixXd k = kernel_.gram(pts, noise, jitter_);
  Eigen::LLT<Eigen::MatrixXd> llt(k);
  if (llt.info() != Eigen::Success) {
    throw ConditioningError("PosteriorState: Cholesky factorization of the training system failed");
  }
  chol_ = llt.matrixL();
  alpha_ = chol_.triangularView<Eigen::Lower>().solve(resid_);
  chol_.triangularView<Eigen::Lower>().transpose().solveInPlace(alpha_);
}

Eigen::VectorXd PosteriorState::prior_cross(const AugmentedPoint& p) const {
  Eigen::VectorXd k(static_cast<Eigen::Index>(obs_.size()));
  for (Eigen::Index i = 0; i < k.size(); ++i) {
    k[i] = kernel_(obs_[static_cast<std::size_t>(i)].point(), p);
  }
  return k;
}

Eigen::MatrixXd PosteriorState::solve_lower(const Eigen::MatrixXd& rhs) const {
  return chol_.triangularView<Eigen::Lower>().solve(rhs);
}

double PosteriorState::posterior_mean(const AugmentedPoint& p) const {
  double value = mean_(p);
  if (!obs_.empty()) value += prior_cross(p).dot(alpha_);
  return value;
}

double PosteriorState::posterior_cov(const AugmentedPoint& p, const AugmentedPoint& q) const {
  double value = kernel_(p, q);
  if (!obs_.empty()) {
    const Eigen::VectorXd vp = solve_lower(prior_cross(p));
    const Eigen::VectorXd vq = solve_lower(prior_cross(q));
    value -= vp.dot(vq);
  }
  return value;
}

double PosteriorState::posterior_var(const AugmentedPoint& p) const {
  return std::max(0.0, posterior_cov(p, p));
}

PosteriorState PosteriorState::update(const Observation& obs) const {
  PosteriorState next(*this);
  next.obs_.push_back(obs);

  const Eigen::Index n = chol_.rows();
  const AugmentedPoint p = obs.point();
  Eigen::VectorXd cross = prior_cross(p);
  const double lambda = (obs.noise_var == 0.0) ? jitter_ : obs.noise_var;
  const double diag = kernel_(p, p) + lambda;

  next.chol_.conservativeResize(n + 1, n + 1);
  next.chol_.row(n).setZero();
  next.chol_.col(n).setZero();
  double d = diag;
  if (n > 0) {
    const Eigen::VectorXd row = chol_.triangularView<Eigen::Lower>().solve(cross);
    next.chol_.row(n).head(n) = row.transpose();
    d -= row.squaredNorm();
  }
  if (!(d > 0.0) || !std::isfinite(d)) {
    throw ConditioningError("PosteriorState::update: Cholesky extension failed for observation at " +
                            describe(obs));
  }
  next.chol_(n, n) = std::sqrt(d);

  next.resid_.conservativeResize(n + 1);
  next.resid_[n] = obs.y - mean_(p);
  next.alpha_ = next.chol_.triangularView<Eigen::Lower>().solve(next.resid_);
  next.chol_.triangularView<Eigen::Lower>().transpose().solveInPlace(next.alpha_);
  return next;
}

Eigen::VectorXd PosteriorState::sigma_tilde(const AugmentedPoint& candidate,
                                            double candidate_noise_var,
                                            std::span<const AugmentedPoint> targets) const {
  OneStepLookahead lookahead(*this, std::vector<AugmentedPoint>(targets.begin(), targets.end()));
  return lookahead.sigma_tilde(candidate, candidate_noise_var);
}

OneStepLookahead::OneStepLookahead(const PosteriorState& state, std::vector<AugmentedPoint> targets)
    : state_(&state), targets_(std::move(targets)) {
  if (targets_.empty()) throw InvalidInput("OneStepLookahead: target list must be nonempty");
  const Eigen::Index n = state.chol_lower().rows();
  const Eigen::Index j = static_cast<Eigen::Index>(targets_.size());
  Eigen::MatrixXd cross(n, j);
  for (Eigen::Index t = 0; t < j; ++t) {
    cross.col(t) = state.prior_cross(targets_[static_cast<std::size_t>(t)]);
  }
  solved_ = state.solve_lower(cross);
  means_.resize(j);
  for (Eigen::Index t = 0; t < j; ++t) {
    double m = state.mean_function()(targets_[static_cast<std::size_t>(t)]);
    if (n > 0) m += cross.col(t).dot(state.alpha());
    means_[t] = m;
  }
}

Eigen::VectorXd OneStepLookahead::sigma_tilde(const AugmentedPoint& candidate,
                                              double candidate_noise_var) const {
  const Eigen::Index j = static_cast<Eigen::Index>(targets_.size());
  const Eigen::Index n = state_->chol_lower().rows();
  Eigen::VectorXd cov(j);
  double var = state_->kernel()(candidate, candidate);
  if (n > 0) {
    const Eigen::VectorXd vc = state_->solve_lower(state_->prior_cross(candidate));
    var -= vc.squaredNorm();
    for (Eigen::Index t = 0; t < j; ++t) {
      cov[t] = state_->kernel()(targets_[static_cast<std::size_t>(t)], candidate) -
               solved_.col(t).dot(vc);
    }
  } else {
    for (Eigen::Index t = 0; t < j; ++t) {
      cov[t] = state_->kernel()(targets_[static_cast<std::size_t>(t)], candidate);
    }
  }
  var = std::max(0.0, var);
  const double denom = candidate_noise_var + var;
  if (!(denom > 0.0) || !std::isfinite(denom)) {
    throw ConditioningError("sigma_tilde: predictive variance of the candidate is not positive");
  }
  return cov / std::sqrt(denom);
}

}  // namespace misobo
