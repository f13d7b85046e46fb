#include "dini/partition.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dini {

void ProgressivePartition::check_level(std::size_t m) const {
  if (m < 1 || m > max_level_) {
    throw std::out_of_range("level " + std::to_string(m) + " outside 1.." + std::to_string(max_level_));
  }
}

std::vector<std::size_t> ProgressivePartition::level(std::size_t m) const {
  check_level(m);
  std::vector<std::size_t> ids;
  ids.reserve(m);
  for (std::size_t id = 0; id < nodes_.size(); ++id) {
    if (nodes_[id].is_cell_at(m)) ids.push_back(id);
  }
  std::sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) { return nodes_[a].cell.lo < nodes_[b].cell.lo; });
  return ids;
}

std::vector<IntervalRC> ProgressivePartition::cells(std::size_t m) const {
  std::vector<IntervalRC> out;
  for (std::size_t id : level(m)) out.push_back(nodes_[id].cell);
  return out;
}

std::vector<std::size_t> ProgressivePartition::nodes_up_to(std::size_t m) const {
  check_level(m);
  std::vector<std::size_t> ids;
  for (std::size_t id = 0; id < nodes_.size(); ++id) {
    if (nodes_[id].born <= m) ids.push_back(id);
  }
  return ids;
}

std::size_t ProgressivePartition::locate(double x, std::size_t m) const {
  check_level(m);
  if (!domain_.contains(x)) return kNoNode;
  std::size_t id = 0;
  while (nodes_[id].is_split_by(m)) {
    const PartitionNode& n = nodes_[id];
    id = nodes_[n.left].cell.contains(x) ? n.left : n.right;
  }
  return id;
}

double ProgressivePartition::max_cell_length(std::size_t m) const {
  double longest = 0.0;
  for (std::size_t id : level(m)) longest = std::max(longest, nodes_[id].cell.length());
  return longest;
}

CsvTable ProgressivePartition::to_csv(const TargetMeasure& p) const {
  CsvTable t;
  t.header = {"level", "lo", "hi", "P_mass"};
  for (std::size_t m = 1; m <= max_level_; ++m) {
    for (std::size_t id : level(m)) {
      const IntervalRC& c = nodes_[id].cell;
      t.rows.push_back({std::to_string(m), format_real(c.lo), format_real(c.hi), format_real(measure_of(p, c))});
    }
  }
  return t;
}

ProgressivePartition build_psp(const IntervalRC& domain, std::size_t max_level, std::span<const double> avoid_atoms) {
  if (max_level < 1) throw std::invalid_argument("max_level must be at least 1");
  ProgressivePartition psp;
  psp.domain_ = domain;
  psp.max_level_ = max_level;
  psp.nodes_.push_back({domain, kNoNode, kNoNode, kNoNode, 1, 0});

  const auto collides = [&](double x) {
    return std::any_of(avoid_atoms.begin(), avoid_atoms.end(),
                       [&](double a) { return std::abs(a - x) <= kCoincidenceTolerance; });
  };

  std::vector<std::size_t> current{0};  // cells of the latest level, left to right
  for (std::size_t m = 1; m < max_level; ++m) {
    double longest = 0.0;
    for (std::size_t id : current) longest = std::max(longest, psp.nodes_[id].cell.length());
    std::size_t pos = 0;
    while (psp.nodes_[current[pos]].cell.length() < longest * (1.0 - 1e-9)) ++pos;

    const std::size_t target = current[pos];
    const IntervalRC cell = psp.nodes_[target].cell;
    double cut = cell.midpoint();
    if (collides(cut)) {
      cut += cell.length() / 7.0;
      if (collides(cut)) {
        throw PartitionError("no valid split for cell " + to_string(cell) + ": midpoint and shifted point are atoms");
      }
    }
    if (!(cell.lo < cut && cut < cell.hi)) {
      throw PartitionError("cell " + to_string(cell) + " is too small to split");
    }

    const std::size_t left = psp.nodes_.size();
    psp.nodes_.push_back({IntervalRC(cell.lo, cut), target, kNoNode, kNoNode, m + 1, 0});
    psp.nodes_.push_back({IntervalRC(cut, cell.hi), target, kNoNode, kNoNode, m + 1, 0});
    PartitionNode& parent = psp.nodes_[target];
    parent.left = left;
    parent.right = left + 1;
    parent.split = m + 1;
    psp.split_log_.push_back(target);

    current[pos] = left;
    current.insert(current.begin() + static_cast<std::ptrdiff_t>(pos) + 1, left + 1);
  }
  return psp;
}

CountingView::CountingView(std::span<const double> values) : sorted_(values.begin(), values.end()) {
  std::sort(sorted_.begin(), sorted_.end());
}

std::size_t CountingView::count(const IntervalRC& iv) const {
  const auto hi = std::upper_bound(sorted_.begin(), sorted_.end(), iv.hi);
  const auto lo = std::upper_bound(sorted_.begin(), sorted_.end(), iv.lo);
  return hi > lo ? static_cast<std::size_t>(hi - lo) : 0;
}

double vague_discrepancy(const PseudoEmpiricalMeasure& e, const TargetMeasure& p, const ProgressivePartition& psp,
                         std::size_t level) {
  double worst = 0.0;
  for (std::size_t id : psp.nodes_up_to(level)) {
    const IntervalRC& cell = psp.node(id).cell;
    if (!is_continuity_interval(p, cell)) {
      throw std::domain_error("cell " + to_string(cell) + " is not a continuity interval of the target");
    }
    worst = std::max(worst, std::abs(pem_mass(e, cell).value() - measure_of(p, cell)));
  }
  return worst;
}

MembershipReport check_membership(const TargetMeasure& p, const CountingView& q, const ProgressivePartition& psp,
                                  std::size_t inf_threshold, std::size_t max_level) {
  MembershipReport report;
  const std::size_t top = max_level == 0 ? psp.max_level() : max_level;
  for (std::size_t id : psp.nodes_up_to(top)) {
    const PartitionNode& n = psp.node(id);
    const double mass = measure_of(p, n.cell);
    if (mass <= kMassEpsilon) continue;
    const std::size_t c = q.count(n.cell);
    if (c < inf_threshold) report.violations.push_back({id, n.born, n.cell, mass, c});
  }
  report.ok = report.violations.empty();
  return report;
}

}  // namespace dini
