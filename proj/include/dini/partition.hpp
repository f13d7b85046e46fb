#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "dini/csv.hpp"
#include "dini/empirical.hpp"
#include "dini/interval.hpp"
#include "dini/measure.hpp"

namespace dini {

class PartitionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kNoNode = std::numeric_limits<std::size_t>::max();

/// One interval of the refinement tree. A node is a cell of level m when it
/// was born at or before m and has not been split by level m.
struct PartitionNode {
  IntervalRC cell;
  std::size_t parent = kNoNode;
  std::size_t left = kNoNode;
  std::size_t right = kNoNode;
  std::size_t born = 1;
  std::size_t split = 0;  // level at which the children appear, 0 if never split

  bool is_cell_at(std::size_t level) const noexcept { return born <= level && (split == 0 || split > level); }
  bool is_split_by(std::size_t level) const noexcept { return split != 0 && split <= level; }
};

/// Nested partitions of a domain: level m holds m cells and level m+1 splits
/// exactly one cell of level m in two.
class ProgressivePartition {
 public:
  const IntervalRC& domain() const noexcept { return domain_; }
  std::size_t max_level() const noexcept { return max_level_; }
  std::span<const PartitionNode> nodes() const noexcept { return nodes_; }
  const PartitionNode& node(std::size_t id) const { return nodes_.at(id); }

  /// Node ids of the cells of level m, left to right.
  std::vector<std::size_t> level(std::size_t m) const;
  std::vector<IntervalRC> cells(std::size_t m) const;
  /// Node split when going from level m to level m + 1.
  std::size_t split_node(std::size_t m) const { return split_log_.at(m - 1); }
  /// Distinct nodes that are cells of some level in 1..m.
  std::vector<std::size_t> nodes_up_to(std::size_t m) const;
  /// Cell of level m containing x, or kNoNode when x is outside the domain.
  std::size_t locate(double x, std::size_t m) const;
  double max_cell_length(std::size_t m) const;

  /// Rows (level, lo, hi, P_mass) for every level.
  CsvTable to_csv(const TargetMeasure& p) const;

 private:
  friend ProgressivePartition build_psp(const IntervalRC&, std::size_t, std::span<const double>);
  void check_level(std::size_t m) const;

  IntervalRC domain_;
  std::size_t max_level_ = 1;
  std::vector<PartitionNode> nodes_;
  std::vector<std::size_t> split_log_;
};

/// Dyadic breadth-first refinement up to `max_level`: the longest cell
/// (leftmost among equals) is split at its midpoint. A midpoint landing on an
/// entry of `avoid_atoms` moves right by a seventh of the cell length; if that
/// also collides a PartitionError is thrown.
ProgressivePartition build_psp(const IntervalRC& domain, std::size_t max_level,
                               std::span<const double> avoid_atoms = {});

/// Number of pool values in a set.
class CountingView {
 public:
  CountingView() = default;
  explicit CountingView(std::span<const double> values);

  std::size_t count(const IntervalRC& iv) const;
  std::size_t size() const noexcept { return sorted_.size(); }

 private:
  std::vector<double> sorted_;
};

/// Max over every cell of levels 1..level of |E(H) - P(H)|. Throws
/// std::domain_error when a visited cell is not a P-continuity interval.
double vague_discrepancy(const PseudoEmpiricalMeasure& e, const TargetMeasure& p, const ProgressivePartition& psp,
                         std::size_t level);

struct MembershipViolation {
  std::size_t node = kNoNode;
  std::size_t level = 0;  // first level at which the cell appears
  IntervalRC cell;
  double p_mass = 0.0;
  std::size_t count = 0;
};

struct MembershipReport {
  bool ok = true;
  std::vector<MembershipViolation> violations;
};

inline constexpr std::size_t kDefaultInfinityThreshold = 32;

/// Every cell of levels 1..max_level with positive P-mass must hold at least
/// `inf_threshold` pool values (the finite stand-in for infinitely many).
/// `max_level == 0` checks every level of the partition.
MembershipReport check_membership(const TargetMeasure& p, const CountingView& q, const ProgressivePartition& psp,
                                  std::size_t inf_threshold = kDefaultInfinityThreshold, std::size_t max_level = 0);

}  // namespace dini
