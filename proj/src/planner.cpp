#include "dini/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace dini {
namespace {

constexpr std::size_t kUnusedNone = std::numeric_limits<std::size_t>::max();

std::size_t isqrt(std::size_t n) {
  auto r = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

}  // namespace

RefinementSchedule RefinementSchedule::doubling(std::size_t base_level, std::size_t n0) {
  RefinementSchedule s;
  s.base_level = base_level;
  for (std::size_t t = n0; t > 0 && t <= (std::size_t{1} << 62); t *= 2) s.thresholds.push_back(t);
  s.validate();
  return s;
}

void RefinementSchedule::validate() const {
  if (base_level < 1) throw std::invalid_argument("base level must be at least 1");
  for (std::size_t i = 1; i < thresholds.size(); ++i) {
    if (!(thresholds[i - 1] < thresholds[i])) throw std::invalid_argument("refinement thresholds must increase strictly");
  }
}

std::size_t RefinementSchedule::active_level(std::size_t step) const {
  const auto it = std::upper_bound(thresholds.begin(), thresholds.end(), step);
  if (it == thresholds.begin()) return base_level;
  return base_level + static_cast<std::size_t>(it - thresholds.begin()) - 1;
}

NullSlotSchedule NullSlotSchedule::perfect_squares() {
  return {"squares", [](std::size_t step) {
            const std::size_t r = isqrt(step);
            return r * r == step;
          }};
}

NullSlotSchedule NullSlotSchedule::never() {
  return {"never", [](std::size_t) { return false; }};
}

CellClasses classify_cells(const TargetMeasure& p, const ProgressivePartition& psp, std::size_t level) {
  CellClasses out;
  for (std::size_t id : psp.level(level)) {
    const IntervalRC& cell = psp.node(id).cell;
    if (measure_of(p, cell) > kMassEpsilon) {
      out.positive.push_back(id);
    } else {
      out.null.push_back(id);
      out.null_union.push_back(cell);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

Planner::Planner(const TargetMeasure& p, std::span<const double> values, const ProgressivePartition& psp,
                 PlannerOptions options)
    : p_(&p), values_(values), psp_(&psp), options_(std::move(options)) {
  options_.refinement.validate();
  if (!options_.null_slots.is_null_slot) options_.null_slots = NullSlotSchedule::never();
  if (!psp.domain().within(p.domain()) || !p.domain().within(psp.domain())) {
    throw std::invalid_argument("partition and target measure must share the same domain");
  }
  const std::size_t base = options_.refinement.base_level;
  if (base > psp.max_level()) throw std::invalid_argument("base level deeper than the partition");

  const auto nodes = psp.nodes();
  masses_.resize(nodes.size());
  for (std::size_t id = 0; id < nodes.size(); ++id) masses_[id] = measure_of(p, nodes[id].cell);
  counts_.assign(nodes.size(), 0);

  for (std::size_t id : psp.level(base)) {
    if (masses_[id] > kMassEpsilon) base_positive_.push_back(id);
  }
  null_by_level_.resize(psp.max_level() + 1);
  for (std::size_t m = 1; m <= psp.max_level(); ++m) {
    for (std::size_t id : psp.level(m)) {
      if (masses_[id] <= kMassEpsilon) null_by_level_[m].push_back(id);
    }
  }

  // Order value positions by (value, index) so every cell is a contiguous run.
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> sorted(values.size());
  position_of_.assign(values.size(), 0);
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    sorted[pos] = values[order[pos]];
    position_of_[order[pos]] = pos;
  }
  range_.resize(nodes.size());
  for (std::size_t id = 0; id < nodes.size(); ++id) {
    const IntervalRC& c = nodes[id].cell;
    const auto lo = std::upper_bound(sorted.begin(), sorted.end(), c.lo) - sorted.begin();
    const auto hi = std::upper_bound(sorted.begin(), sorted.end(), c.hi) - sorted.begin();
    range_[id] = {static_cast<std::size_t>(lo), static_cast<std::size_t>(std::max(lo, hi))};
  }

  while (leaves_ < std::max<std::size_t>(1, values.size())) leaves_ *= 2;
  tree_.assign(2 * leaves_, kUnusedNone);
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    if (psp.domain().contains(sorted[pos])) tree_[leaves_ + pos] = order[pos];
  }
  for (std::size_t k = leaves_ - 1; k >= 1; --k) tree_[k] = std::min(tree_[2 * k], tree_[2 * k + 1]);

  deepest_.resize(values.size());
  for (std::size_t j = 0; j < values.size(); ++j) deepest_[j] = psp.locate(values[j], psp.max_level());
  used_.assign(values.size(), false);
}

std::span<const std::size_t> Planner::null_cells(std::size_t level) const { return null_by_level_.at(level); }

double Planner::positive_cell_score(std::size_t base_node) const {
  const double denom = static_cast<double>(used_count_ + 1);
  double total = 0.0;
  for (std::size_t id : base_positive_) {
    const double c = static_cast<double>(counts_[id]) + (id == base_node ? 1.0 : 0.0);
    total += std::abs(c / denom - masses_[id]);
  }
  return total;
}

Planner::Descent Planner::descend() const {
  if (base_positive_.empty()) throw std::logic_error("target has no positive cell at the base level");
  Descent d;
  d.base_score = std::numeric_limits<double>::infinity();
  for (std::size_t id : base_positive_) {
    const double a = positive_cell_score(id);
    if (a < d.base_score) {
      d.base_score = a;
      d.base = id;
    }
  }

  const std::size_t level = active_level();
  if (level > psp_->max_level()) throw std::invalid_argument("partition shallower than the active level");
  const double denom = static_cast<double>(used_count_ + 1);
  std::size_t node = d.base;
  while (psp_->node(node).is_split_by(level)) {
    const PartitionNode& n = psp_->node(node);
    const std::size_t l = n.left, r = n.right;
    const bool left_positive = masses_[l] > kMassEpsilon;
    const bool right_positive = masses_[r] > kMassEpsilon;
    if (left_positive != right_positive) {
      node = left_positive ? l : r;
      continue;
    }
    const double cl = static_cast<double>(counts_[l]);
    const double cr = static_cast<double>(counts_[r]);
    const double b1 = std::abs((cl + 1.0) / denom - masses_[l]) + std::abs(cr / denom - masses_[r]);
    const double b2 = std::abs(cl / denom - masses_[l]) + std::abs((cr + 1.0) / denom - masses_[r]);
    d.drill_score = std::min(b1, b2);
    node = b1 <= b2 ? l : r;
  }
  d.leaf = node;
  return d;
}

std::size_t Planner::select_positive_cell() const { return descend().leaf; }

std::size_t Planner::lowest_unused(std::size_t node) const {
  auto [lo, hi] = range_[node];
  std::size_t best = kUnusedNone;
  for (lo += leaves_, hi += leaves_; lo < hi; lo /= 2, hi /= 2) {
    if (lo & 1) best = std::min(best, tree_[lo++]);
    if (hi & 1) best = std::min(best, tree_[--hi]);
  }
  return best;
}

void Planner::record(std::size_t index, PlanStep info) {
  used_[index] = true;
  ++used_count_;
  for (std::size_t k = leaves_ + position_of_[index]; k >= 1; k /= 2) {
    tree_[k] = k >= leaves_ ? kUnusedNone : std::min(tree_[2 * k], tree_[2 * k + 1]);
  }
  for (std::size_t id = deepest_[index]; id != kNoNode; id = psp_->node(id).parent) ++counts_[id];
  info.step = used_count_;
  info.index = index;
  history_.push_back(info);
}

std::size_t Planner::next_index() {
  const std::size_t step_no = used_count_ + 1;
  const std::size_t level = active_level();
  if (level > psp_->max_level()) throw std::invalid_argument("partition shallower than the active level");

  if (options_.null_slots.is_null_slot(step_no)) {
    std::size_t best = kUnusedNone, best_cell = kNoNode;
    for (std::size_t id : null_by_level_[level]) {
      const std::size_t j = lowest_unused(id);
      if (j < best) {
        best = j;
        best_cell = id;
      }
    }
    if (best != kUnusedNone) {
      record(best, {0, 0, level, best_cell, kNoNode, PickKind::Null, 0.0, 0.0});
      return best;
    }
  }

  const Descent d = descend();
  const std::size_t j = lowest_unused(d.leaf);
  if (j == kUnusedNone) {
    throw ExhaustionError("cell " + to_string(psp_->node(d.leaf).cell) + " has no unused values at step " +
                              std::to_string(step_no),
                          step_no, d.leaf);
  }
  record(j, {0, 0, level, d.leaf, d.base, PickKind::Positive, d.base_score, d.drill_score});
  return j;
}

void Planner::assign(std::size_t index) {
  if (index >= values_.size()) throw std::out_of_range("value index out of range");
  if (used_[index]) throw std::invalid_argument("value " + std::to_string(index) + " already placed");
  if (deepest_[index] == kNoNode) throw std::invalid_argument("value outside the partition domain");
  const std::size_t level = std::min(active_level(), psp_->max_level());
  record(index, {0, 0, level, psp_->locate(values_[index], level), kNoNode, PickKind::Assigned, 0.0, 0.0});
}

std::vector<std::size_t> Planner::sequence() const {
  std::vector<std::size_t> out;
  out.reserve(history_.size());
  for (const PlanStep& s : history_) out.push_back(s.index);
  return out;
}

// ---------------------------------------------------------------------------

PermutationPlan PermutationPlan::identity(std::size_t n) {
  PermutationPlan plan;
  plan.indices.resize(n);
  std::iota(plan.indices.begin(), plan.indices.end(), std::size_t{0});
  return plan;
}

CsvTable PermutationPlan::to_csv(std::span<const double> values) const {
  CsvTable t;
  t.header = {"step", "index", "mark", "cell", "score"};
  t.rows.reserve(indices.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const std::size_t j = indices[k];
    std::string cell = "", score = "";
    if (k < steps.size()) {
      cell = steps[k].cell == kNoNode ? "" : std::to_string(steps[k].cell);
      score = steps[k].kind == PickKind::Positive ? format_real(steps[k].base_score) : "null";
    }
    t.rows.push_back({std::to_string(k + 1), std::to_string(j), format_real(values[j]), cell, score});
  }
  return t;
}

ProgressivePartition partition_for(const TargetMeasure& p, std::size_t n_max, const RefinementSchedule& schedule) {
  const std::vector<double> atoms = p.atom_locations();
  return build_psp(p.domain(), std::max<std::size_t>(1, schedule.active_level(n_max)), atoms);
}

void check_plan_inputs(const TargetMeasure& p, std::span<const double> values, std::size_t n_max,
                       const ProgressivePartition& psp, const PlannerOptions& options) {
  const std::size_t deepest = options.refinement.active_level(std::max<std::size_t>(n_max, 1));
  if (deepest > psp.max_level()) {
    throw std::invalid_argument("partition has " + std::to_string(psp.max_level()) + " levels but step " +
                                std::to_string(n_max) + " needs level " + std::to_string(deepest));
  }
  const std::size_t inside = static_cast<std::size_t>(
      std::count_if(values.begin(), values.end(), [&](double v) { return p.domain().contains(v); }));
  if (n_max > inside) {
    throw ExhaustionError("plan of length " + std::to_string(n_max) + " needs more than the " +
                              std::to_string(inside) + " available values",
                          inside + 1, 0);
  }
  for (std::size_t id : psp.nodes_up_to(deepest)) {
    if (!is_continuity_interval(p, psp.node(id).cell)) {
      throw std::domain_error("cell " + to_string(psp.node(id).cell) + " is not a continuity interval");
    }
  }
  const MembershipReport report =
      check_membership(p, CountingView(values), psp, options.membership_threshold, deepest);
  if (!report.ok) {
    const MembershipViolation& v = report.violations.front();
    throw MembershipError("cell " + to_string(v.cell) + " has P-mass " + format_real(v.p_mass) + " but only " +
                              std::to_string(v.count) + " values (" + std::to_string(report.violations.size()) +
                              " violating cells)",
                          report);
  }
}

PermutationPlan build_permutation(const TargetMeasure& p, std::span<const double> values, std::size_t n_max,
                                  const ProgressivePartition& psp, const PlannerOptions& options) {
  check_plan_inputs(p, values, n_max, psp, options);
  Planner planner(p, values, psp, options);
  for (std::size_t k = 0; k < n_max; ++k) planner.next_index();
  PermutationPlan plan;
  plan.indices = planner.sequence();
  plan.steps.assign(planner.history().begin(), planner.history().end());
  return plan;
}

}  // namespace dini
