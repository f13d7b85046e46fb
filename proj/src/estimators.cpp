#include "dini/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dini {

bool is_checkpoint(std::size_t n, std::size_t n_max) { return n == n_max || (n > 0 && (n & (n - 1)) == 0); }

CsvTable ConvergenceTrace::to_csv(double oracle) const {
  CsvTable t;
  t.header = {"n", "value", "oracle", "abs_error"};
  for (const Checkpoint& c : checkpoints) {
    t.rows.push_back({std::to_string(c.n), format_real(c.value), format_real(oracle),
                      format_real(std::abs(c.value - oracle))});
  }
  return t;
}

ConvergenceTrace running_mean(const PermutationPlan& plan, DrawLedger& ledger, const ObservationPool& pool) {
  ConvergenceTrace trace;
  const std::size_t n_max = plan.size();
  std::uint64_t successes = 0;
  for (std::size_t k = 0; k < n_max; ++k) {
    successes += static_cast<std::uint64_t>(ledger.observe(pool, plan.indices[k]));
    if (is_checkpoint(k + 1, n_max)) {
      trace.checkpoints.push_back({k + 1, static_cast<double>(successes) / static_cast<double>(k + 1)});
    }
  }
  return trace;
}

ConvergenceTrace mean_trace(const PermutationPlan& plan, const ObservationPool& pool) {
  ConvergenceTrace trace;
  const std::size_t n_max = plan.size();
  double sum = 0.0;
  for (std::size_t k = 0; k < n_max; ++k) {
    sum += pool.marks()[plan.indices.at(k)];
    if (is_checkpoint(k + 1, n_max)) trace.checkpoints.push_back({k + 1, sum / static_cast<double>(k + 1)});
  }
  return trace;
}

IntervalFrequency interval_frequency(const PermutationPlan& plan, DrawLedger& ledger, const ObservationPool& pool,
                                     const IntervalRC& iv) {
  if (!iv.within(IntervalRC(0.0, pool.horizon()))) {
    throw std::invalid_argument("interval " + to_string(iv) + " is not inside (0, T]");
  }
  IntervalFrequency out;
  const std::size_t n_max = plan.size();
  IntervalCount running;
  for (std::size_t k = 0; k < n_max; ++k) {
    const std::size_t j = plan.indices[k];
    const int y = ledger.observe(pool, j);
    if (iv.contains(pool.times()[j])) {
      ++running.hits;
      running.successes += static_cast<std::size_t>(y);
    }
    running.n = k + 1;
    if (!is_checkpoint(k + 1, n_max)) continue;
    out.counts.push_back(running);
    if (running.hits == 0) {
      out.skipped.push_back(k + 1);
    } else {
      out.trace.checkpoints.push_back(
          {k + 1, static_cast<double>(running.successes) / static_cast<double>(running.hits)});
    }
  }
  return out;
}

ConvergenceTrace pointwise_estimate(double t_star, const ObservationPool& pool, DrawLedger& ledger, std::size_t n_max) {
  if (const auto& scheme = pool.scheme()) {
    double target = t_star;
    if (const auto* c = std::get_if<ConvergentTo>(&*scheme)) {
      target = c->target;
    } else if (const auto* s = std::get_if<TwoSided>(&*scheme)) {
      target = s->target;
    } else {
      throw std::invalid_argument("pointwise estimation needs a pool converging to t*, got " + pool.scheme_tag());
    }
    if (target != t_star) {
      throw std::invalid_argument("pool converges to " + std::to_string(target) + ", not to t* = " +
                                  std::to_string(t_star));
    }
  }
  if (n_max == 0) n_max = pool.size();
  if (n_max > pool.size()) throw std::invalid_argument("pointwise estimate longer than the pool");
  return running_mean(PermutationPlan::identity(n_max), ledger, pool);
}

SidedIndices split_sides(const ObservationPool& pool, double t_star) {
  SidedIndices out;
  for (std::size_t j = 0; j < pool.size(); ++j) {
    const double t = pool.times()[j];
    if (t > t_star) {
      out.right.push_back(j);
    } else if (t < t_star) {
      out.left.push_back(j);
    }
  }
  return out;
}

ConvergenceTrace jump_estimate(double t_star, const ObservationPool& pool, std::span<const std::size_t> right,
                               std::span<const std::size_t> left, DrawLedger& ledger, std::size_t n_max) {
  std::vector<std::size_t> a(right.begin(), right.end()), b(left.begin(), left.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<std::size_t> shared;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(shared));
  if (!shared.empty()) {
    throw DoubleDrawError("right and left pools overlap at index " + std::to_string(shared.front()));
  }
  for (std::size_t j : right) {
    if (!(pool.times()[j] > t_star)) throw std::invalid_argument("right pool has a time at or left of t*");
  }
  for (std::size_t j : left) {
    if (!(pool.times()[j] < t_star)) throw std::invalid_argument("left pool has a time at or right of t*");
  }
  const std::size_t available = std::min(right.size(), left.size());
  if (n_max == 0) n_max = available;
  if (n_max > available) throw std::invalid_argument("jump estimate longer than the shorter side");

  ConvergenceTrace trace;
  std::uint64_t right_sum = 0, left_sum = 0;
  for (std::size_t k = 0; k < n_max; ++k) {
    right_sum += static_cast<std::uint64_t>(ledger.observe(pool, right[k]));
    left_sum += static_cast<std::uint64_t>(ledger.observe(pool, left[k]));
    if (is_checkpoint(k + 1, n_max)) {
      const double n = static_cast<double>(k + 1);
      trace.checkpoints.push_back({k + 1, static_cast<double>(right_sum) / n - static_cast<double>(left_sum) / n});
    }
  }
  return trace;
}

ConvergenceTrace jump_estimate(double t_star, const ObservationPool& pool, DrawLedger& ledger, std::size_t n_max) {
  const SidedIndices sides = split_sides(pool, t_star);
  return jump_estimate(t_star, pool, sides.right, sides.left, ledger, n_max);
}

}  // namespace dini
