#include "dini/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dini {

Fraction::Fraction(std::int64_t numerator, std::int64_t denominator) {
  if (denominator == 0) throw std::domain_error("fraction with zero denominator");
  if (denominator < 0) {
    numerator = -numerator;
    denominator = -denominator;
  }
  const std::int64_t g = std::gcd(numerator, denominator);
  num_ = g == 0 ? 0 : numerator / g;
  den_ = g == 0 ? 1 : denominator / g;
}

Fraction operator+(const Fraction& a, const Fraction& b) {
  const std::int64_t l = std::lcm(a.den_, b.den_);
  return Fraction(a.num_ * (l / a.den_) + b.num_ * (l / b.den_), l);
}

Fraction operator*(const Fraction& a, const Fraction& b) {
  const Fraction left(a.num_, b.den_);
  const Fraction right(b.num_, a.den_);
  return Fraction(left.numerator() * right.numerator(), left.denominator() * right.denominator());
}

PseudoEmpiricalMeasure::PseudoEmpiricalMeasure(std::vector<double> marks)
    : marks_(std::move(marks)), sorted_(marks_) {
  std::sort(sorted_.begin(), sorted_.end());
}

PseudoEmpiricalMeasure PseudoEmpiricalMeasure::prefix(std::size_t k) const {
  if (k > marks_.size()) throw std::out_of_range("prefix longer than the measure");
  return PseudoEmpiricalMeasure(std::vector<double>(marks_.begin(), marks_.begin() + static_cast<std::ptrdiff_t>(k)));
}

std::size_t PseudoEmpiricalMeasure::count(const IntervalRC& iv) const {
  const auto upto_hi = std::upper_bound(sorted_.begin(), sorted_.end(), iv.hi);
  const auto upto_lo = std::upper_bound(sorted_.begin(), sorted_.end(), iv.lo);
  return upto_hi > upto_lo ? static_cast<std::size_t>(upto_hi - upto_lo) : 0;
}

Fraction pem_mass(const PseudoEmpiricalMeasure& e, const IntervalRC& iv) {
  if (e.size() == 0) throw std::domain_error("pseudo-empirical measure with no marks");
  return Fraction(static_cast<std::int64_t>(e.count(iv)), static_cast<std::int64_t>(e.size()));
}

PseudoEmpiricalMeasure pushforward(const PseudoEmpiricalMeasure& e, const RealFunction& g) {
  std::vector<double> mapped;
  mapped.reserve(e.size());
  for (double x : e.marks()) {
    const double y = g(x);
    if (!std::isfinite(y)) throw std::invalid_argument("map is not evaluable at " + std::to_string(x));
    mapped.push_back(y);
  }
  return PseudoEmpiricalMeasure(std::move(mapped));
}

}  // namespace dini
