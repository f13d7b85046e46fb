#include "dini/ledger.hpp"

#include <string>

namespace dini {

int DrawLedger::draw_locked(const ObservationPool& pool, std::size_t j) {
  if (j >= pool.size()) throw std::out_of_range("pool index " + std::to_string(j) + " out of range");
  if (bound_pool_ && *bound_pool_ != pool.fingerprint()) {
    throw DoubleDrawError("ledger already holds draws from a different pool");
  }
  bound_pool_ = pool.fingerprint();
  const int y = counter_uniform(seed_, j) < pool.marks()[j] ? 1 : 0;
  outcomes_.emplace(j, static_cast<std::uint8_t>(y));
  order_.push_back(j);
  return y;
}

int DrawLedger::draw(const ObservationPool& pool, std::size_t j) {
  std::lock_guard lock(mutex_);
  if (outcomes_.contains(j)) {
    throw DoubleDrawError("Y(t_" + std::to_string(j) + ") was already observed");
  }
  return draw_locked(pool, j);
}

int DrawLedger::observe(const ObservationPool& pool, std::size_t j) {
  std::lock_guard lock(mutex_);
  if (bound_pool_ && *bound_pool_ != pool.fingerprint()) {
    throw DoubleDrawError("ledger already holds draws from a different pool");
  }
  if (const auto it = outcomes_.find(j); it != outcomes_.end()) return it->second;
  return draw_locked(pool, j);
}

std::optional<int> DrawLedger::outcome(std::size_t j) const {
  std::lock_guard lock(mutex_);
  if (const auto it = outcomes_.find(j); it != outcomes_.end()) return it->second;
  return std::nullopt;
}

std::vector<std::size_t> DrawLedger::order() const {
  std::lock_guard lock(mutex_);
  return order_;
}

std::size_t DrawLedger::size() const {
  std::lock_guard lock(mutex_);
  return order_.size();
}

CsvTable DrawLedger::to_csv(const ObservationPool& pool) const {
  std::lock_guard lock(mutex_);
  CsvTable t;
  t.header = {"order", "j", "t_j", "outcome"};
  t.rows.reserve(order_.size());
  for (std::size_t k = 0; k < order_.size(); ++k) {
    const std::size_t j = order_[k];
    t.rows.push_back({std::to_string(k + 1), std::to_string(j), format_real(pool.times()[j]),
                      std::to_string(static_cast<int>(outcomes_.at(j)))});
  }
  return t;
}

}  // namespace dini
