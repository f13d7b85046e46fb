#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "dini/csv.hpp"
#include "dini/mean_function.hpp"

namespace dini {

struct Equispaced {
  std::size_t size = 0;
};
struct RadicalInverse {
  std::size_t size = 0;
};
/// t_j = t* + T rate / j
struct ConvergentTo {
  double target = 0.5;
  double rate = 0.1;
  std::size_t size = 0;
};
/// Interleaved t* + T rate / k, t* - T rate / k.
struct TwoSided {
  double target = 0.5;
  double rate = 0.1;
  std::size_t size = 0;
};
struct SeededUniform {
  std::size_t size = 0;
  std::uint64_t seed = 0;
};

using PoolScheme = std::variant<Equispaced, RadicalInverse, ConvergentTo, TwoSided, SeededUniform>;

std::string scheme_name(const PoolScheme& scheme);
std::size_t scheme_size(const PoolScheme& scheme);

/// Base-2 van der Corput value of j: the bits of j mirrored about the binary point.
double radical_inverse(std::uint64_t j);

class PoolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Observation times t_0..t_{N-1} for a scheme on (0, T]. Throws PoolError
/// when two times coincide after clamping.
std::vector<double> generate_times(const PoolScheme& scheme, double horizon);

/// Candidate observation times with their cached marks p0(t_j).
class ObservationPool {
 public:
  ObservationPool(std::vector<double> times, const MeanFunction& mean, std::string scheme_tag = "explicit");

  std::span<const double> times() const noexcept { return times_; }
  std::span<const double> marks() const noexcept { return marks_; }
  std::size_t size() const noexcept { return times_.size(); }
  double horizon() const noexcept { return horizon_; }
  const std::string& scheme_tag() const noexcept { return tag_; }
  /// Hash of times and marks; identifies the pool a ledger is bound to.
  std::uint64_t fingerprint() const noexcept { return fingerprint_; }
  /// The generating scheme, when the pool came from generate_pool.
  const std::optional<PoolScheme>& scheme() const noexcept { return scheme_; }

  /// Rows (j, t_j, mark).
  CsvTable to_csv() const;

 private:
  std::vector<double> times_;
  std::vector<double> marks_;
  double horizon_;
  std::string tag_;
  std::uint64_t fingerprint_ = 0;
  std::optional<PoolScheme> scheme_;

  friend ObservationPool generate_pool(const PoolScheme&, const MeanFunction&);
};

ObservationPool generate_pool(const PoolScheme& scheme, const MeanFunction& mean);

}  // namespace dini
