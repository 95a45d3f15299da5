/*
 * This file is part of misobo, a library for multi-information source
 * Bayesian optimization.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#ifndef MISOBO_NORMAL_HPP_
#define MISOBO_NORMAL_HPP_

#include <cmath>
#include <numbers>

namespace misobo {

inline double norm_pdf(double z) {
  return std::exp(-0.5 * z * z) * 0.3989422804014326779;  // 1/sqrt(2*pi)
}

/// Standard normal cdf through the complementary error function, which is
/// accurate in both tails.
inline double norm_cdf(double z) {
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

/// emv(z) = phi(z) + z * Phi(z), the expected value of max(0, z + Z) for
/// standard normal Z. Direct evaluation cancels catastrophically for
/// z << 0, where the value decays like phi(z)/z^2; there we switch to the
/// Mills-ratio asymptotic series
///   emv(-t) = phi(t) * (1/t^2 - 3/t^4 + 15/t^6 - ...),
/// truncated at its smallest term.
inline double expected_max_value(double z) {
  if (z > -6.0) {
    return norm_pdf(z) + z * norm_cdf(z);
  }
  const double t2 = z * z;  // z <= -6
  double term = 1.0 / t2;
  double sum = term;
  double odd = 3.0;  // next factor (2k+1)
  for (int k = 1; k < 16; ++k) {
    const double next = term * odd / t2;
    if (next >= term) break;  // asymptotic series started diverging
    term = next;
    sum += (k % 2 == 1) ? -term : term;
    odd += 2.0;
  }
  return norm_pdf(z) * sum;
}

}  // namespace misobo

#endif  // MISOBO_NORMAL_HPP_
