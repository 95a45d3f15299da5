/*
 * This file is part of misobo, a library for multi-information source
 * Bayesian optimization.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#include "misobo/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <utility>

#include "misobo/ascent.hpp"
#include "misobo/normal.hpp"
#include "misobo/rng.hpp"

namespace misobo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Pairs sorted by ascending b; among equal b only the largest a survives
/// (the rest never attain the maximum), and exact duplicates collapse.
struct SortedInstance {
  std::vector<double> a;
  std::vector<double> b;
};

SortedInstance sort_and_dedupe(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    if (b[i] != b[j]) return b[i] < b[j];
    return a[i] < a[j];
  });
  SortedInstance out;
  out.a.reserve(n);
  out.b.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = order[k];
    if (!out.b.empty() && out.b.back() == b[i]) {
      out.a.back() = a[i];  // same b, larger a wins
    } else {
      out.a.push_back(a[i]);
      out.b.push_back(b[i]);
    }
  }
  return out;
}

/// z at which line j (larger slope) overtakes line i.
inline double crossing(const SortedInstance& s, int i, int j) {
  return (s.a[static_cast<std::size_t>(i)] - s.a[static_cast<std::size_t>(j)]) /
         (s.b[static_cast<std::size_t>(j)] - s.b[static_cast<std::size_t>(i)]);
}

/// Linear domination scan over [begin, end): returns the indices of lines on
/// the upper envelope of that range, in ascending slope order.
std::vector<int> envelope_scan(const SortedInstance& s, int begin, int end) {
  std::vector<int> surv;
  std::vector<double> left;  // z where surv[k] starts to win within this range
  for (int i = begin; i < end; ++i) {
    double c = -kInf;
    while (!surv.empty()) {
      c = crossing(s, surv.back(), i);
      if (c <= left.back()) {
        surv.pop_back();
        left.pop_back();
      } else {
        break;
      }
    }
    left.push_back(surv.empty() ? -kInf : c);
    surv.push_back(i);
  }
  return surv;
}

/// Breakpoint between consecutive survivors k and k+1.
inline double survivor_breakpoint(const SortedInstance& s, const std::vector<int>& surv,
                                  std::size_t k) {
  return crossing(s, surv[k], surv[k + 1]);
}

double sum_contributions(const SortedInstance& s, const std::vector<int>& surv) {
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < surv.size(); ++k) {
    const double c = survivor_breakpoint(s, surv, k);
    const double db = s.b[static_cast<std::size_t>(surv[k + 1])] -
                      s.b[static_cast<std::size_t>(surv[k])];
    total += db * expected_max_value(-std::abs(c));
  }
  return total;
}

double h_sorted(const SortedInstance& s) {
  if (s.a.size() <= 1) return 0.0;
  const std::vector<int> surv = envelope_scan(s, 0, static_cast<int>(s.a.size()));
  return sum_contributions(s, surv);
}

/// Merges the envelopes of two adjacent ranges (all slopes in `lhs` are
/// below all slopes in `rhs`). The combined envelope is a prefix of lhs plus
/// a suffix of rhs; elements hidden at the junction are popped from either
/// side until the three crossings around the junction are consistent.
std::vector<int> merge_envelopes(const SortedInstance& s, const std::vector<int>& lhs,
                                 const std::vector<int>& rhs) {
  std::size_t l_end = lhs.size();
  std::size_t r_begin = 0;
  while (l_end > 0 && r_begin < rhs.size()) {
    const double junction = crossing(s, lhs[l_end - 1], rhs[r_begin]);
    const double left_of_l = (l_end >= 2) ? crossing(s, lhs[l_end - 2], lhs[l_end - 1]) : -kInf;
    if (junction <= left_of_l) {
      --l_end;  // last left element never wins once the right side exists
      continue;
    }
    const double right_of_r =
        (r_begin + 1 < rhs.size()) ? crossing(s, rhs[r_begin], rhs[r_begin + 1]) : kInf;
    if (junction >= right_of_r) {
      ++r_begin;  // first right element is covered by its own successor
      continue;
    }
    break;
  }
  std::vector<int> merged;
  merged.reserve(l_end + (rhs.size() - r_begin));
  merged.insert(merged.end(), lhs.begin(), lhs.begin() + static_cast<std::ptrdiff_t>(l_end));
  merged.insert(merged.end(), rhs.begin() + static_cast<std::ptrdiff_t>(r_begin), rhs.end());
  return merged;
}

void validate_h_input(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidInput("h: a and b must have equal length");
  if (a.empty()) throw InvalidInput("h: at least one alternative required");
}

}  // namespace

double h_function(std::span<const double> a, std::span<const double> b) {
  validate_h_input(a, b);
  return h_sorted(sort_and_dedupe(a, b));
}

double h_function_parallel(std::span<const double> a, std::span<const double> b, int workers) {
  validate_h_input(a, b);
  if (workers < 1) throw InvalidInput("h_parallel: worker count must be at least 1");
  const SortedInstance s = sort_and_dedupe(a, b);
  const int n = static_cast<int>(s.a.size());
  if (workers == 1 || n <= 2 * workers) return h_sorted(s);

  // Level-2 parallelism: scan p contiguous chunks concurrently, ...
  const int p = workers;
  std::vector<std::vector<int>> parts(static_cast<std::size_t>(p));
  {
    std::vector<std::future<std::vector<int>>> jobs;
    jobs.reserve(static_cast<std::size_t>(p));
    for (int k = 0; k < p; ++k) {
      const int begin = static_cast<int>(static_cast<long long>(n) * k / p);
      const int end = static_cast<int>(static_cast<long long>(n) * (k + 1) / p);
      jobs.push_back(std::async(std::launch::async,
                                [&s, begin, end] { return envelope_scan(s, begin, end); }));
    }
    for (int k = 0; k < p; ++k) parts[static_cast<std::size_t>(k)] = jobs[static_cast<std::size_t>(k)].get();
  }

  // ... then merge adjacent chunks pairwise, ceil(log2 p) rounds.
  while (parts.size() > 1) {
    std::vector<std::future<std::vector<int>>> jobs;
    std::vector<std::vector<int>> next;
    for (std::size_t k = 0; k + 1 < parts.size(); k += 2) {
      jobs.push_back(std::async(std::launch::async, [&s, &parts, k] {
        return merge_envelopes(s, parts[k], parts[k + 1]);
      }));
    }
    for (auto& job : jobs) next.push_back(job.get());
    if (parts.size() % 2 == 1) next.push_back(std::move(parts.back()));
    parts = std::move(next);
  }
  const std::vector<int>& surv = parts.front();
  if (surv.size() <= 1) return 0.0;

  // Final expectation: partial sums over contiguous survivor ranges in
  // parallel, added in range order.
  const int m = static_cast<int>(surv.size());
  const int chunks = std::min(p, m - 1);
  std::vector<std::future<double>> sums;
  sums.reserve(static_cast<std::size_t>(chunks));
  for (int k = 0; k < chunks; ++k) {
    const int begin = static_cast<int>(static_cast<long long>(m - 1) * k / chunks);
    const int end = static_cast<int>(static_cast<long long>(m - 1) * (k + 1) / chunks);
    sums.push_back(std::async(std::launch::async, [&s, &surv, begin, end] {
      double partial = 0.0;
      for (int i = begin; i < end; ++i) {
        const double c = survivor_breakpoint(s, surv, static_cast<std::size_t>(i));
        const double db = s.b[static_cast<std::size_t>(surv[static_cast<std::size_t>(i) + 1])] -
                          s.b[static_cast<std::size_t>(surv[static_cast<std::size_t>(i)])];
        partial += db * expected_max_value(-std::abs(c));
      }
      return partial;
    }));
  }
  double total = 0.0;
  for (auto& job : sums) total += job.get();
  return total;
}

DiscreteCandidateSet DiscreteCandidateSet::user_supplied(std::vector<Eigen::VectorXd> points,
                                                         const Box& box) {
  if (points.size() < 2) {
    throw InvalidInput("DiscreteCandidateSet: at least two candidate designs required");
  }
  for (const Eigen::VectorXd& p : points) {
    if (!box.contains(p)) throw InvalidInput("DiscreteCandidateSet: point outside the domain box");
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      if ((points[i] - points[j]).cwiseAbs().maxCoeff() == 0.0) {
        throw InvalidInput("DiscreteCandidateSet: candidate designs must be pairwise distinct");
      }
    }
  }
  return DiscreteCandidateSet{std::move(points), Origin::UserSupplied};
}

std::vector<Eigen::VectorXd> latin_hypercube_points(int n, const Box& box, std::uint64_t seed) {
  if (n < 1) throw InvalidInput("latin_hypercube: need at least one point");
  const int d = box.dim();
  Rng rng(mix_seed(seed, 0x1a71));
  std::vector<Eigen::VectorXd> pts(static_cast<std::size_t>(n), Eigen::VectorXd(d));
  std::vector<int> strata(static_cast<std::size_t>(n));
  for (int dim = 0; dim < d; ++dim) {
    std::iota(strata.begin(), strata.end(), 0);
    for (int i = n - 1; i > 0; --i) {  // Fisher-Yates
      const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i + 1)));
      std::swap(strata[static_cast<std::size_t>(i)], strata[static_cast<std::size_t>(j)]);
    }
    for (int i = 0; i < n; ++i) {
      const double u = (strata[static_cast<std::size_t>(i)] + rng.uniform()) / n;
      pts[static_cast<std::size_t>(i)][dim] = box.lower()[dim] + u * box.width(dim);
    }
  }
  return pts;
}

DiscreteCandidateSet latin_hypercube(int n, const Box& box, std::uint64_t seed) {
  return DiscreteCandidateSet{latin_hypercube_points(n, box, seed),
                              DiscreteCandidateSet::Origin::LatinHypercube};
}

CkgEvaluator::CkgEvaluator(const PosteriorState& state, const DiscreteCandidateSet& candidates,
                           const CostNoiseModel& cost_model, const AcquisitionOptions& options)
    : cost_model_(&cost_model),
      lookahead_(state, [&] {
        std::vector<AugmentedPoint> targets;
        targets.reserve(candidates.points.size());
        for (const Eigen::VectorXd& x : candidates.points) targets.emplace_back(0, x);
        return targets;
      }()),
      designs_(candidates.points),
      options_(options) {}

AcquisitionResult CkgEvaluator::evaluate(int source, const Eigen::VectorXd& x) const {
  const double cost = cost_model_->query_cost(source, x);
  if (!(cost > 0.0)) throw InvalidInput("ckg: query cost must be strictly positive");
  const double noise = cost_model_->noise_var(source, x);
  const Eigen::VectorXd b = lookahead_.sigma_tilde(AugmentedPoint(source, x), noise);
  const Eigen::VectorXd& a = lookahead_.target_means();
  const double h = h_function_parallel(std::span<const double>(a.data(), static_cast<std::size_t>(a.size())),
                                       std::span<const double>(b.data(), static_cast<std::size_t>(b.size())),
                                       options_.h_workers);
  AcquisitionResult result;
  result.source = source;
  result.x = x;
  result.h_value = h;
  result.cost = cost;
  result.ckg = h / cost;
  return result;
}

AcquisitionResult ckg(const PosteriorState& state, const DiscreteCandidateSet& candidates,
                      const AugmentedPoint& candidate, const CostNoiseModel& cost_model,
                      const AcquisitionOptions& options) {
  CkgEvaluator evaluator(state, candidates, cost_model, options);
  return evaluator.evaluate(candidate.source, candidate.x);
}

namespace {

/// Lexicographic comparison of equal-length design vectors.
bool lex_less(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] != q[i]) return p[i] < q[i];
  }
  return false;
}

/// Acquisition preference order: larger value, then cheaper, then lower
/// source index, then lexicographically smaller design.
bool acquisition_better(const AcquisitionResult& lhs, const AcquisitionResult& rhs) {
  if (lhs.ckg != rhs.ckg) return lhs.ckg > rhs.ckg;
  if (lhs.cost != rhs.cost) return lhs.cost < rhs.cost;
  if (lhs.source != rhs.source) return lhs.source < rhs.source;
  return lex_less(lhs.x, rhs.x);
}

}  // namespace

AcquisitionResult next_sample(const PosteriorState& state, const DiscreteCandidateSet& candidates,
                              const CostNoiseModel& cost_model, SearchStrategy strategy,
                              const Box& box, const AcquisitionOptions& options,
                              double budget_remaining) {
  if (cost_model.num_sources_total() < 1) throw InvalidInput("next_sample: at least one source required");
  CkgEvaluator evaluator(state, candidates, cost_model, options);
  const int sources = cost_model.num_sources_total();

  bool have_best = false;
  AcquisitionResult best;
  for (int source = 0; source < sources; ++source) {
    for (const Eigen::VectorXd& x : candidates.points) {
      if (cost_model.query_cost(source, x) > budget_remaining) continue;
      AcquisitionResult r = evaluator.evaluate(source, x);
      if (!have_best || acquisition_better(r, best)) {
        best = std::move(r);
        have_best = true;
      }
    }
  }
  if (!have_best) {
    throw InvalidInput("next_sample: no candidate fits the remaining budget");
  }
  const AcquisitionResult enumeration_best = best;

  if (strategy == SearchStrategy::MultistartGradient) {
    AscentOptions ascent;
    ascent.max_iterations = options.max_iterations;
    ascent.fd_step_frac = options.fd_step_frac;
    ascent.convergence_frac = options.convergence_frac;
    for (int source = 0; source < sources; ++source) {
      const Objective objective = [&evaluator, source](const Eigen::VectorXd& x) {
        return evaluator.evaluate(source, x).ckg;
      };
      const std::vector<Eigen::VectorXd> starts = latin_hypercube_points(
          options.restarts, box, mix_seed(options.seed, 0xc8, static_cast<std::uint64_t>(source)));
      for (const Eigen::VectorXd& start : starts) {
        const AscentResult run = maximize_in_box(objective, box, start, ascent);
        if (cost_model.query_cost(source, run.x) > budget_remaining) continue;
        AcquisitionResult r = evaluator.evaluate(source, run.x);
        if (acquisition_better(r, best)) best = std::move(r);
      }
    }
  }

  if (best.ckg <= 1e-12) {
    AcquisitionResult fallback = enumeration_best;
    fallback.no_improvement = true;
    return fallback;
  }
  return best;
}

}  // namespace misobo
