#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "dini/csv.hpp"
#include "dini/pool.hpp"

namespace dini {

/// SplitMix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Uniform in [0, 1) that depends only on (seed, counter): the stream for one
/// index never depends on which other indices were drawn, or when.
constexpr double counter_uniform(std::uint64_t seed, std::uint64_t counter) noexcept {
  const std::uint64_t key = mix64(seed ^ 0x6a09e667f3bcc909ull);
  const std::uint64_t bits = mix64(key + (counter + 1) * 0x9e3779b97f4a7c15ull);
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

class DoubleDrawError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Record of the Bernoulli outcomes Y(t_j), one per pool index at most.
///
/// The outcome at index j is 1 iff counter_uniform(seed, j) < mark_j, so a
/// fixed seed determines every outcome regardless of draw order. The first
/// draw binds the ledger to its pool. Thread-safe.
class DrawLedger {
 public:
  explicit DrawLedger(std::uint64_t seed) : seed_(seed) {}
  DrawLedger(const DrawLedger&) = delete;
  DrawLedger& operator=(const DrawLedger&) = delete;

  std::uint64_t seed() const noexcept { return seed_; }

  /// Draws Y(t_j). Throws DoubleDrawError when j was already drawn.
  int draw(const ObservationPool& pool, std::size_t j);
  /// Returns the recorded outcome of j, drawing it first if needed. Throws
  /// DoubleDrawError when the ledger belongs to a different pool.
  int observe(const ObservationPool& pool, std::size_t j);

  std::optional<int> outcome(std::size_t j) const;
  std::vector<std::size_t> order() const;
  std::size_t size() const;

  /// Rows (order, j, t_j, outcome).
  CsvTable to_csv(const ObservationPool& pool) const;

 private:
  int draw_locked(const ObservationPool& pool, std::size_t j);

  std::uint64_t seed_;
  mutable std::mutex mutex_;
  std::optional<std::uint64_t> bound_pool_;
  std::unordered_map<std::size_t, std::uint8_t> outcomes_;
  std::vector<std::size_t> order_;
};

inline int draw(DrawLedger& ledger, const ObservationPool& pool, std::size_t j) { return ledger.draw(pool, j); }

}  // namespace dini
