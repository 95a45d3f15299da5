/*
 * This file is part of misobo, a library for multi-information source
 * Bayesian optimization.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#include "misobo/kernel.hpp"

#include <cmath>

namespace misobo {

std::string to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::SquaredExponential: return "squared_exponential";
    case KernelFamily::Matern52: return "matern52";
  }
  return "unknown";
}

KernelFamily kernel_family_from_string(const std::string& name) {
  if (name == "squared_exponential" || name == "se") return KernelFamily::SquaredExponential;
  if (name == "matern52" || name == "matern") return KernelFamily::Matern52;
  throw InvalidInput("unknown kernel family '" + name + "'");
}

BaseKernel::BaseKernel(KernelFamily family, const Eigen::VectorXd& length_scales,
                       double signal_variance)
    : family_(family) {
  if (length_scales.size() == 0) {
    throw InvalidInput("BaseKernel: at least one length scale required");
  }
  if (!(signal_variance > 0.0) || !std::isfinite(signal_variance)) {
    throw InvalidInput("BaseKernel: signal variance must be positive and finite");
  }
  for (Eigen::Index i = 0; i < length_scales.size(); ++i) {
    if (!(length_scales[i] > 0.0) || !std::isfinite(length_scales[i])) {
      throw InvalidInput("BaseKernel: length scales must be positive and finite");
    }
  }
  log_ls_ = length_scales.array().log();
  log_sv_ = std::log(signal_variance);
  inv_ls_ = length_scales.cwiseInverse();
  sv_ = signal_variance;
}

BaseKernel BaseKernel::from_log(KernelFamily family, const Eigen::VectorXd& log_length_scales,
                                double log_signal_variance) {
  return BaseKernel(family, log_length_scales.array().exp(), std::exp(log_signal_variance));
}

double BaseKernel::operator()(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
  if (x.size() != log_ls_.size() || y.size() != log_ls_.size()) {
    throw InvalidInput("BaseKernel: design dimension does not match kernel dimension");
  }
  const double r2 = ((x - y).cwiseProduct(inv_ls_)).squaredNorm();
  switch (family_) {
    case KernelFamily::SquaredExponential:
      return sv_ * std::exp(-0.5 * r2);
    case KernelFamily::Matern52: {
      const double r = std::sqrt(r2);
      const double s = std::sqrt(5.0) * r;
      return sv_ * (1.0 + s + 5.0 * r2 / 3.0) * std::exp(-s);
    }
  }
  return 0.0;  // unreachable
}

MisoKernel::MisoKernel(BaseKernel truth, std::vector<BaseKernel> discrepancies,
                       std::vector<double> fidelity, std::vector<int> group_of,
                       std::vector<BaseKernel> group_kernels)
    : truth_(std::move(truth)),
      discrepancy_(std::move(discrepancies)),
      fidelity_(std::move(fidelity)),
      group_of_(std::move(group_of)),
      group_kernels_(std::move(group_kernels)) {
  const int m = num_sources();
  for (const BaseKernel& k : discrepancy_) {
    if (k.dim() != truth_.dim()) {
      throw InvalidInput("MisoKernel: all kernels must share the design dimension");
    }
  }
  if (fidelity_.empty()) {
    fidelity_.assign(static_cast<std::size_t>(m), 1.0);
  } else if (static_cast<int>(fidelity_.size()) != m) {
    throw InvalidInput("MisoKernel: fidelity coefficients must have one entry per biased source");
  }
  for (double a : fidelity_) {
    if (!(a > 0.0) || !std::isfinite(a)) {
      throw InvalidInput("MisoKernel: fidelity coefficients must be positive");
    }
  }
  if (!group_of_.empty()) {
    if (static_cast<int>(group_of_.size()) != m + 1) {
      throw InvalidInput("MisoKernel: group map must cover every source including the truth source");
    }
    for (int g : group_of_) {
      if (g < 0 || g >= static_cast<int>(group_kernels_.size())) {
        throw InvalidInput("MisoKernel: group id out of range of the group kernels");
      }
    }
    for (const BaseKernel& k : group_kernels_) {
      if (k.dim() != truth_.dim()) {
        throw InvalidInput("MisoKernel: all kernels must share the design dimension");
      }
    }
  }
}

const BaseKernel& MisoKernel::discrepancy_kernel(int source) const {
  if (source < 1 || source > num_sources()) {
    throw InvalidInput("MisoKernel: discrepancy kernel index out of range");
  }
  return discrepancy_[static_cast<std::size_t>(source - 1)];
}

double MisoKernel::operator()(const AugmentedPoint& p, const AugmentedPoint& q) const {
  const int m = num_sources();
  if (p.source < 0 || p.source > m || q.source < 0 || q.source > m) {
    throw InvalidInput("MisoKernel: source index out of range");
  }
  double value = truth_(p.x, q.x);
  // The truth source carries no group or per-source discrepancy.
  if (p.source > 0 && q.source > 0) {
    if (!group_of_.empty() && group_of_[p.source] == group_of_[q.source]) {
      value += group_kernels_[static_cast<std::size_t>(group_of_[p.source])](p.x, q.x);
    }
    if (p.source == q.source) {
      value += fidelity_[static_cast<std::size_t>(p.source - 1)] *
               discrepancy_[static_cast<std::size_t>(p.source - 1)](p.x, q.x);
    }
  }
  return value;
}

Eigen::MatrixXd MisoKernel::gram(std::span<const AugmentedPoint> points,
                                 std::span<const double> noise, double jitter) const {
  if (noise.size() != points.size()) {
    throw InvalidInput("MisoKernel::gram: noise vector length must match point count");
  }
  for (double v : noise) {
    if (v < 0.0 || !std::isfinite(v)) {
      throw InvalidInput("MisoKernel::gram: noise variances must be finite and nonnegative");
    }
  }
  const Eigen::Index n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double v = (*this)(points[static_cast<std::size_t>(i)], points[static_cast<std::size_t>(j)]);
      k(i, j) = v;
      k(j, i) = v;
    }
    const double lambda = noise[static_cast<std::size_t>(i)];
    k(i, i) += (lambda == 0.0) ? jitter : lambda;
  }
  return k;
}

}  // namespace misobo
