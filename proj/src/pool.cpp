#include "dini/pool.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <unordered_set>

namespace dini {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double clamp_time(double t, double horizon) {
  const double smallest = std::numeric_limits<double>::denorm_min();
  return std::clamp(t, smallest, horizon);
}

void require_positive(std::size_t n, const char* what) {
  if (n == 0) throw std::invalid_argument(std::string(what) + ": pool size must be positive");
}

void require_target(double target, double rate, double horizon, const char* what) {
  if (!(0.0 < target && target < horizon)) throw std::invalid_argument(std::string(what) + ": t* must lie in (0, T)");
  if (!(rate > 0.0)) throw std::invalid_argument(std::string(what) + ": rate must be positive");
}

}  // namespace

std::string scheme_name(const PoolScheme& scheme) {
  return std::visit(Overloaded{
                        [](const Equispaced&) { return std::string("equispaced"); },
                        [](const RadicalInverse&) { return std::string("radical_inverse"); },
                        [](const ConvergentTo&) { return std::string("convergent_to"); },
                        [](const TwoSided&) { return std::string("two_sided"); },
                        [](const SeededUniform&) { return std::string("seeded_uniform"); },
                    },
                    scheme);
}

std::size_t scheme_size(const PoolScheme& scheme) {
  return std::visit([](const auto& s) { return s.size; }, scheme);
}

double radical_inverse(std::uint64_t j) {
  std::uint64_t reversed = 0;
  for (int bit = 0; bit < 64; ++bit) {
    reversed = (reversed << 1) | (j & 1u);
    j >>= 1;
  }
  // Keep the top 53 bits so the conversion is exact.
  return static_cast<double>(reversed >> 11) * 0x1.0p-53;
}

std::vector<double> generate_times(const PoolScheme& scheme, double horizon) {
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  std::vector<double> times;
  std::visit(Overloaded{
                 [&](const Equispaced& s) {
                   require_positive(s.size, "equispaced");
                   for (std::size_t j = 1; j <= s.size; ++j) {
                     times.push_back(static_cast<double>(j) * horizon / static_cast<double>(s.size + 1));
                   }
                 },
                 [&](const RadicalInverse& s) {
                   require_positive(s.size, "radical_inverse");
                   for (std::size_t j = 1; j <= s.size; ++j) times.push_back(horizon * radical_inverse(j));
                 },
                 [&](const ConvergentTo& s) {
                   require_positive(s.size, "convergent_to");
                   require_target(s.target, s.rate, horizon, "convergent_to");
                   for (std::size_t j = 1; j <= s.size; ++j) {
                     times.push_back(clamp_time(s.target + horizon * s.rate / static_cast<double>(j), horizon));
                   }
                 },
                 [&](const TwoSided& s) {
                   require_positive(s.size, "two_sided");
                   require_target(s.target, s.rate, horizon, "two_sided");
                   for (std::size_t j = 0; j < s.size; ++j) {
                     const double k = static_cast<double>(j / 2 + 1);
                     const double offset = horizon * s.rate / k;
                     times.push_back(clamp_time(j % 2 == 0 ? s.target + offset : s.target - offset, horizon));
                   }
                 },
                 [&](const SeededUniform& s) {
                   require_positive(s.size, "seeded_uniform");
                   std::mt19937_64 engine(s.seed);
                   std::unordered_set<double> seen;
                   while (times.size() < s.size) {
                     const double u = static_cast<double>(engine() >> 11) * 0x1.0p-53;
                     const double t = horizon * (1.0 - u);  // in (0, T]
                     if (seen.insert(t).second) times.push_back(t);
                   }
                 },
             },
             scheme);

  std::vector<double> sorted = times;
  std::sort(sorted.begin(), sorted.end());
  const auto dup = std::adjacent_find(sorted.begin(), sorted.end());
  if (dup != sorted.end()) {
    throw PoolError(scheme_name(scheme) + " pool has duplicate time " + std::to_string(*dup) + " after clamping");
  }
  return times;
}

ObservationPool::ObservationPool(std::vector<double> times, const MeanFunction& mean, std::string scheme_tag)
    : times_(std::move(times)), horizon_(mean.horizon()), tag_(std::move(scheme_tag)) {
  std::vector<double> sorted = times_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw PoolError("observation times must be pairwise distinct");
  }
  marks_.reserve(times_.size());
  for (double t : times_) {
    if (!(0.0 < t && t <= horizon_)) throw PoolError("observation time " + std::to_string(t) + " outside (0, T]");
    marks_.push_back(eval_mean(mean, t));
  }
  std::uint64_t h = 0xcbf29ce484222325ull;
  const auto feed = [&](double x) {
    h ^= std::bit_cast<std::uint64_t>(x);
    h *= 0x100000001b3ull;
    h ^= h >> 29;
  };
  for (std::size_t j = 0; j < times_.size(); ++j) {
    feed(times_[j]);
    feed(marks_[j]);
  }
  fingerprint_ = h;
}

CsvTable ObservationPool::to_csv() const {
  CsvTable t;
  t.header = {"j", "t_j", "mark"};
  t.rows.reserve(size());
  for (std::size_t j = 0; j < size(); ++j) {
    t.rows.push_back({std::to_string(j), format_real(times_[j]), format_real(marks_[j])});
  }
  return t;
}

ObservationPool generate_pool(const PoolScheme& scheme, const MeanFunction& mean) {
  ObservationPool pool(generate_times(scheme, mean.horizon()), mean, scheme_name(scheme));
  pool.scheme_ = scheme;
  return pool;
}

}  // namespace dini
