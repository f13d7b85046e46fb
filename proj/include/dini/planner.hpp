#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dini/csv.hpp"
#include "dini/measure.hpp"
#include "dini/partition.hpp"

namespace dini {

/// Which partition level drives the choice at a given step: the base level m
/// plus the largest i with thresholds[i] <= step (m itself before the first
/// threshold).
struct RefinementSchedule {
  std::size_t base_level = 1;
  std::vector<std::size_t> thresholds;

  static constexpr std::size_t kDefaultStart = 64;
  /// thresholds n0 * 2^i for every i that fits in 2^62.
  static RefinementSchedule doubling(std::size_t base_level = 1, std::size_t n0 = kDefaultStart);

  std::size_t active_level(std::size_t step) const;
  void validate() const;
};

/// Steps reserved for marks lying in P-null cells.
struct NullSlotSchedule {
  std::string name;
  std::function<bool(std::size_t)> is_null_slot;

  static NullSlotSchedule perfect_squares();
  static NullSlotSchedule never();
};

struct PlannerOptions {
  RefinementSchedule refinement = RefinementSchedule::doubling();
  NullSlotSchedule null_slots = NullSlotSchedule::perfect_squares();
  std::size_t membership_threshold = kDefaultInfinityThreshold;
};

struct CellClasses {
  std::vector<std::size_t> positive;  // node ids, left to right
  std::vector<std::size_t> null;
  std::vector<IntervalRC> null_union;  // B0 as a list of cells
};

/// Splits the cells of one level by whether P gives them positive mass.
CellClasses classify_cells(const TargetMeasure& p, const ProgressivePartition& psp, std::size_t level);

enum class PickKind { Positive, Null, Assigned };

struct PlanStep {
  std::size_t step = 0;
  std::size_t index = 0;
  std::size_t level = 0;      // active level at this step
  std::size_t cell = kNoNode;  // active cell that received the pick
  std::size_t base_cell = kNoNode;
  PickKind kind = PickKind::Positive;
  double base_score = 0.0;   // a-score of the chosen base cell (positive picks)
  double drill_score = 0.0;  // last two-way score on the way down, 0 if none
};

class ExhaustionError : public std::runtime_error {
 public:
  ExhaustionError(std::string what, std::size_t step, std::size_t cell)
      : std::runtime_error(std::move(what)), step_(step), cell_(cell) {}
  std::size_t step() const noexcept { return step_; }
  std::size_t cell() const noexcept { return cell_; }

 private:
  std::size_t step_;
  std::size_t cell_;
};

class MembershipError : public std::runtime_error {
 public:
  MembershipError(std::string what, MembershipReport report)
      : std::runtime_error(std::move(what)), report_(std::move(report)) {}
  const MembershipReport& report() const noexcept { return report_; }

 private:
  MembershipReport report_;
};

/// Greedy state machine that orders pool values so that the running
/// equal-weight measure tracks P on every cell of the partition.
///
/// At each step it either serves a null slot from the P-null cells of the
/// active level (lowest unused index first) or scores the positive cells of
/// the base level, takes the minimiser and walks down the refinement tree by
/// pairwise comparisons until it reaches a cell of the active level; the pick
/// is the lowest unused index inside that cell. The measure, values and
/// partition must outlive the planner.
class Planner {
 public:
  Planner(const TargetMeasure& p, std::span<const double> values, const ProgressivePartition& psp,
          PlannerOptions options = {});

  std::size_t step() const noexcept { return used_count_; }
  /// Level driving the next pick (step() + 1).
  std::size_t active_level() const { return options_.refinement.active_level(used_count_ + 1); }
  std::size_t base_level() const noexcept { return options_.refinement.base_level; }
  std::span<const std::size_t> base_positive() const noexcept { return base_positive_; }
  std::span<const std::size_t> null_cells(std::size_t level) const;

  std::size_t count(std::size_t node) const { return counts_.at(node); }
  double mass(std::size_t node) const { return masses_.at(node); }
  bool used(std::size_t index) const { return used_.at(index); }
  /// Cell of the full partition that holds value `index`, kNoNode if outside.
  std::size_t deepest_cell(std::size_t index) const { return deepest_.at(index); }

  /// Total absolute deviation over the base positive cells after placing the
  /// next pick in `base_node`.
  double positive_cell_score(std::size_t base_node) const;
  /// Cell of the active level chosen for the next positive pick.
  std::size_t select_positive_cell() const;

  /// Chooses, records and returns the next pool index.
  std::size_t next_index();
  /// Records `index` as the next pick without choosing it (seeding states).
  void assign(std::size_t index);

  std::span<const PlanStep> history() const noexcept { return history_; }
  std::vector<std::size_t> sequence() const;

 private:
  struct Descent {
    std::size_t base = kNoNode;
    std::size_t leaf = kNoNode;
    double base_score = 0.0;
    double drill_score = 0.0;
  };
  Descent descend() const;
  std::size_t lowest_unused(std::size_t node) const;
  void record(std::size_t index, PlanStep info);

  const TargetMeasure* p_;
  std::span<const double> values_;
  const ProgressivePartition* psp_;
  PlannerOptions options_;

  std::vector<double> masses_;
  std::vector<std::size_t> counts_;
  std::vector<std::size_t> base_positive_;
  std::vector<std::vector<std::size_t>> null_by_level_;

  // Value positions sorted by value; each node owns a contiguous range.
  std::vector<std::size_t> position_of_;
  std::vector<std::pair<std::size_t, std::size_t>> range_;
  std::vector<std::size_t> tree_;  // min unused index over positions
  std::size_t leaves_ = 1;

  std::vector<std::size_t> deepest_;
  std::vector<bool> used_;
  std::size_t used_count_ = 0;
  std::vector<PlanStep> history_;
};

/// An injective sequence of pool indices with optional per-step diagnostics.
struct PermutationPlan {
  std::vector<std::size_t> indices;
  std::vector<PlanStep> steps;

  static PermutationPlan identity(std::size_t n);
  std::size_t size() const noexcept { return indices.size(); }
  /// Rows (step, pool index, mark, cell id, score).
  CsvTable to_csv(std::span<const double> values) const;
};

/// Runs the planner for n_max steps.
///
/// Throws ExhaustionError when n_max exceeds the number of values inside the
/// domain or a chosen cell runs dry, MembershipError when a P-positive cell of
/// a level reached before n_max holds fewer than the membership threshold of
/// values, std::domain_error when such a cell is not a P-continuity interval,
/// and std::invalid_argument when the partition is too shallow.
PermutationPlan build_permutation(const TargetMeasure& p, std::span<const double> values, std::size_t n_max,
                                  const ProgressivePartition& psp, const PlannerOptions& options = {});

/// The precondition checks of build_permutation, without planning.
void check_plan_inputs(const TargetMeasure& p, std::span<const double> values, std::size_t n_max,
                       const ProgressivePartition& psp, const PlannerOptions& options = {});

/// Partition deep enough for n_max steps under `schedule`, avoiding atoms of P.
ProgressivePartition partition_for(const TargetMeasure& p, std::size_t n_max, const RefinementSchedule& schedule);

}  // namespace dini
