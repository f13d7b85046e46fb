#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dini/csv.hpp"
#include "dini/interval.hpp"
#include "dini/ledger.hpp"
#include "dini/planner.hpp"
#include "dini/pool.hpp"

namespace dini {

struct Checkpoint {
  std::size_t n = 0;
  double value = 0.0;
};

/// Values of a running estimator at n = 1, 2, 4, ... and at the final n.
struct ConvergenceTrace {
  std::vector<Checkpoint> checkpoints;

  bool empty() const noexcept { return checkpoints.empty(); }
  std::size_t final_n() const { return checkpoints.back().n; }
  double final_value() const { return checkpoints.back().value; }
  /// Rows (n, value, oracle, abs_error).
  CsvTable to_csv(double oracle) const;
};

/// True for n in {1, 2, 4, ...} or n == n_max.
bool is_checkpoint(std::size_t n, std::size_t n_max);

/// Permuted relative frequency of successes along the plan.
ConvergenceTrace running_mean(const PermutationPlan& plan, DrawLedger& ledger, const ObservationPool& pool);

/// Average of the marks p0(t_j) along the plan; no randomness involved.
ConvergenceTrace mean_trace(const PermutationPlan& plan, const ObservationPool& pool);

struct IntervalCount {
  std::size_t n = 0;
  std::size_t hits = 0;       // plan times inside the interval so far
  std::size_t successes = 0;  // outcomes equal to 1 among those
};

struct IntervalFrequency {
  ConvergenceTrace trace;              // restricted mean, checkpoints with hits > 0 only
  std::vector<IntervalCount> counts;   // every checkpoint, skipped ones included
  std::vector<std::size_t> skipped;    // checkpoints with no hit yet
  double count_ratio() const { return static_cast<double>(counts.back().hits) / static_cast<double>(counts.back().n); }
};

/// Relative frequency restricted to plan times that fall inside iv.
IntervalFrequency interval_frequency(const PermutationPlan& plan, DrawLedger& ledger, const ObservationPool& pool,
                                     const IntervalRC& iv);

/// Plain relative frequency over the first n pool times of a pool converging
/// to t*. Throws std::invalid_argument if the pool was generated by a scheme
/// that converges elsewhere.
ConvergenceTrace pointwise_estimate(double t_star, const ObservationPool& pool, DrawLedger& ledger,
                                    std::size_t n_max = 0);

/// Pool indices of times right and left of t*, each in index order.
struct SidedIndices {
  std::vector<std::size_t> right;
  std::vector<std::size_t> left;
};
SidedIndices split_sides(const ObservationPool& pool, double t_star);

/// Difference of the relative frequencies over the two index sequences; the
/// k-th checkpoint uses the first k indices of each side. Throws
/// DoubleDrawError when the sides share an index.
ConvergenceTrace jump_estimate(double t_star, const ObservationPool& pool, std::span<const std::size_t> right,
                               std::span<const std::size_t> left, DrawLedger& ledger, std::size_t n_max = 0);

/// Convenience overload splitting a two-sided pool at t*.
ConvergenceTrace jump_estimate(double t_star, const ObservationPool& pool, DrawLedger& ledger, std::size_t n_max = 0);

}  // namespace dini
