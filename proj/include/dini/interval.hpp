#pragma once

#include <stdexcept>
#include <string>

namespace dini {

/// Left-open, right-closed interval (lo, hi].
struct IntervalRC {
  double lo = 0.0;
  double hi = 1.0;

  IntervalRC() = default;
  IntervalRC(double lo_, double hi_) : lo(lo_), hi(hi_) {
    if (!(lo < hi)) {
      throw std::invalid_argument("IntervalRC requires lo < hi, got (" + std::to_string(lo) + ", " +
                                  std::to_string(hi) + "]");
    }
  }

  bool contains(double x) const noexcept { return lo < x && x <= hi; }
  double length() const noexcept { return hi - lo; }
  double midpoint() const noexcept { return lo + 0.5 * (hi - lo); }

  /// True when (lo, hi] is a subset of `outer`.
  bool within(const IntervalRC& outer) const noexcept { return outer.lo <= lo && hi <= outer.hi; }

  friend bool operator==(const IntervalRC&, const IntervalRC&) = default;
};

inline std::string to_string(const IntervalRC& iv) {
  return "(" + std::to_string(iv.lo) + ", " + std::to_string(iv.hi) + "]";
}

}  // namespace dini
