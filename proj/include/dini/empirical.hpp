#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <vector>

#include "dini/interval.hpp"
#include "dini/quadrature.hpp"

namespace dini {

/// Exact ratio of two integers, kept in lowest terms.
class Fraction {
 public:
  Fraction() = default;
  Fraction(std::int64_t numerator, std::int64_t denominator);

  std::int64_t numerator() const noexcept { return num_; }
  std::int64_t denominator() const noexcept { return den_; }
  double value() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }

  friend Fraction operator+(const Fraction& a, const Fraction& b);
  friend Fraction operator*(const Fraction& a, const Fraction& b);
  friend bool operator==(const Fraction&, const Fraction&) = default;

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

/// Equal-weight measure 1/n on an ordered list of marks. The first k marks
/// form the measure at step k.
class PseudoEmpiricalMeasure {
 public:
  PseudoEmpiricalMeasure() = default;
  explicit PseudoEmpiricalMeasure(std::vector<double> marks);

  std::span<const double> marks() const noexcept { return marks_; }
  std::size_t size() const noexcept { return marks_.size(); }
  PseudoEmpiricalMeasure prefix(std::size_t k) const;

  /// Number of marks inside iv (binary search over a sorted copy).
  std::size_t count(const IntervalRC& iv) const;

 private:
  std::vector<double> marks_;
  std::vector<double> sorted_;
};

/// count(iv) / n, exactly. Throws std::domain_error when n == 0.
Fraction pem_mass(const PseudoEmpiricalMeasure& e, const IntervalRC& iv);

/// Marks mapped pointwise through g; order and n are preserved.
PseudoEmpiricalMeasure pushforward(const PseudoEmpiricalMeasure& e, const RealFunction& g);

}  // namespace dini
