#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

namespace dini {

struct Polynomial {
  std::vector<double> coefficients;  // c0 + c1 t + c2 t^2 + ...
  double operator()(double t) const;
};

/// offset + amplitude * sin(2 pi frequency t + phase)
struct Sinusoid {
  double amplitude = 0.0;
  double frequency = 1.0;
  double phase = 0.0;
  double offset = 0.5;
  double operator()(double t) const;
};

/// Polynomial pieces joined at breakpoints. Piece k covers
/// [breakpoints[k-1], breakpoints[k]); the value at a breakpoint is the one on
/// its right.
struct PiecewiseRightContinuous {
  std::vector<double> breakpoints;
  std::vector<Polynomial> pieces;  // breakpoints.size() + 1 entries
};

/// Linear interpolation through (grid[k], values[k]); the grid spans [0, T].
struct Tabulated {
  std::vector<double> grid;
  std::vector<double> values;
};

/// The time-varying success probability of the urn on [0, T].
class MeanFunction {
 public:
  using Kind = std::variant<Polynomial, Sinusoid, PiecewiseRightContinuous, Tabulated>;

  /// Validates the shape and checks the range lies in [0, 1] on a 2^14-point
  /// grid plus every breakpoint and its left limit.
  MeanFunction(Kind kind, double horizon);

  static MeanFunction constant(double c, double horizon = 1.0);
  static MeanFunction identity(double horizon = 1.0);
  static MeanFunction step(double at, double left, double right, double horizon = 1.0);

  double horizon() const noexcept { return horizon_; }
  const Kind& kind() const noexcept { return kind_; }
  /// Declared jump locations (empty for continuous kinds).
  std::span<const double> breakpoints() const noexcept;

  /// Unchecked evaluation, right-continuous at breakpoints.
  double value(double t) const;
  /// Unchecked left limit.
  double left_value(double t) const;

 private:
  Kind kind_;
  double horizon_;
};

/// p0(t) for 0 <= t <= T. Throws std::out_of_range otherwise.
double eval_mean(const MeanFunction& f, double t);

/// Limit of p0(s) as s -> t from the left, for 0 < t <= T.
double left_limit(const MeanFunction& f, double t);

}  // namespace dini
