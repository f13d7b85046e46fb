#pragma once

#include <functional>
#include <span>

namespace dini {

using RealFunction = std::function<double(double)>;

inline constexpr double kQuadratureTolerance = 1e-10;

/// Adaptive Simpson quadrature of f over [a, b] with absolute tolerance `abs_tol`.
///
/// Breakpoints strictly inside (a, b) split the range first so that kinks and
/// jumps of piecewise-smooth integrands land on panel edges. The tolerance is
/// shared among the pieces in proportion to their length. Reversed limits give
/// the negated integral.
double integrate(const RealFunction& f, double a, double b, double abs_tol = kQuadratureTolerance,
                 std::span<const double> breakpoints = {});

}  // namespace dini
