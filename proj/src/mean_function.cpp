#include "dini/mean_function.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dini {
namespace {

constexpr std::size_t kRangeCheckPoints = std::size_t{1} << 14;
constexpr double kRangeSlack = 1e-12;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Index of the piece active at t under right-continuity.
std::size_t piece_index(const PiecewiseRightContinuous& p, double t) {
  return static_cast<std::size_t>(std::upper_bound(p.breakpoints.begin(), p.breakpoints.end(), t) -
                                  p.breakpoints.begin());
}

double interpolate(const Tabulated& tab, double t) {
  if (t <= tab.grid.front()) return tab.values.front();
  if (t >= tab.grid.back()) return tab.values.back();
  const auto it = std::upper_bound(tab.grid.begin(), tab.grid.end(), t);
  const std::size_t k = static_cast<std::size_t>(it - tab.grid.begin()) - 1;
  const double w = (t - tab.grid[k]) / (tab.grid[k + 1] - tab.grid[k]);
  return tab.values[k] + w * (tab.values[k + 1] - tab.values[k]);
}

}  // namespace

double Polynomial::operator()(double t) const {
  double acc = 0.0;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * t + *it;
  return acc;
}

double Sinusoid::operator()(double t) const {
  return offset + amplitude * std::sin(2.0 * std::numbers::pi * frequency * t + phase);
}

namespace {

double raw_value(const MeanFunction::Kind& kind, double t) {
  return std::visit(Overloaded{
                        [&](const Polynomial& p) { return p(t); },
                        [&](const Sinusoid& s) { return s(t); },
                        [&](const PiecewiseRightContinuous& p) { return p.pieces[piece_index(p, t)](t); },
                        [&](const Tabulated& tab) { return interpolate(tab, t); },
                    },
                    kind);
}

double raw_left_value(const MeanFunction::Kind& kind, double t) {
  if (const auto* p = std::get_if<PiecewiseRightContinuous>(&kind)) {
    const auto it = std::lower_bound(p->breakpoints.begin(), p->breakpoints.end(), t);
    return p->pieces[static_cast<std::size_t>(it - p->breakpoints.begin())](t);
  }
  return raw_value(kind, t);
}

}  // namespace

MeanFunction::MeanFunction(Kind kind, double horizon) : kind_(std::move(kind)), horizon_(horizon) {
  if (!(horizon_ > 0.0) || !std::isfinite(horizon_)) throw std::invalid_argument("horizon must be positive");
  std::visit(Overloaded{
                 [](const Polynomial& p) {
                   if (p.coefficients.empty()) throw std::invalid_argument("polynomial has no coefficients");
                 },
                 [](const Sinusoid&) {},
                 [&](const PiecewiseRightContinuous& p) {
                   if (p.pieces.size() != p.breakpoints.size() + 1) {
                     throw std::invalid_argument("piecewise mean needs one more piece than breakpoints");
                   }
                   for (std::size_t k = 0; k < p.breakpoints.size(); ++k) {
                     const double b = p.breakpoints[k];
                     if (!(0.0 < b && b < horizon_)) throw std::invalid_argument("breakpoint outside (0, T)");
                     if (k > 0 && !(p.breakpoints[k - 1] < b)) throw std::invalid_argument("breakpoints not increasing");
                   }
                   for (const Polynomial& piece : p.pieces) {
                     if (piece.coefficients.empty()) throw std::invalid_argument("empty piece");
                   }
                 },
                 [&](const Tabulated& t) {
                   if (t.grid.size() < 2 || t.grid.size() != t.values.size()) {
                     throw std::invalid_argument("tabulated mean needs matching grid and values (>= 2)");
                   }
                   for (std::size_t k = 1; k < t.grid.size(); ++k) {
                     if (!(t.grid[k - 1] < t.grid[k])) throw std::invalid_argument("tabulated grid not increasing");
                   }
                   if (t.grid.front() > 0.0 || t.grid.back() < horizon_) {
                     throw std::invalid_argument("tabulated grid must cover [0, T]");
                   }
                 },
             },
             kind_);

  const auto check = [&](double t, double v) {
    if (!std::isfinite(v) || v < -kRangeSlack || v > 1.0 + kRangeSlack) {
      throw std::invalid_argument("mean function leaves [0, 1] at t = " + std::to_string(t));
    }
  };
  for (std::size_t k = 0; k <= kRangeCheckPoints; ++k) {
    const double t = horizon_ * static_cast<double>(k) / kRangeCheckPoints;
    check(t, raw_value(kind_, t));
  }
  for (double b : breakpoints()) {
    check(b, raw_value(kind_, b));
    check(b, raw_left_value(kind_, b));
  }
}

MeanFunction MeanFunction::constant(double c, double horizon) { return MeanFunction(Polynomial{{c}}, horizon); }

MeanFunction MeanFunction::identity(double horizon) {
  return MeanFunction(Polynomial{{0.0, 1.0 / horizon}}, horizon);
}

MeanFunction MeanFunction::step(double at, double left, double right, double horizon) {
  return MeanFunction(PiecewiseRightContinuous{{at}, {Polynomial{{left}}, Polynomial{{right}}}}, horizon);
}

std::span<const double> MeanFunction::breakpoints() const noexcept {
  if (const auto* p = std::get_if<PiecewiseRightContinuous>(&kind_)) return p->breakpoints;
  return {};
}

double MeanFunction::value(double t) const { return std::clamp(raw_value(kind_, t), 0.0, 1.0); }

double MeanFunction::left_value(double t) const { return std::clamp(raw_left_value(kind_, t), 0.0, 1.0); }

double eval_mean(const MeanFunction& f, double t) {
  if (!(0.0 <= t && t <= f.horizon())) {
    throw std::out_of_range("t = " + std::to_string(t) + " outside [0, " + std::to_string(f.horizon()) + "]");
  }
  return f.value(t);
}

double left_limit(const MeanFunction& f, double t) {
  if (!(0.0 < t && t <= f.horizon())) {
    throw std::out_of_range("left limit needs 0 < t <= T, got t = " + std::to_string(t));
  }
  return f.left_value(t);
}

}  // namespace dini
