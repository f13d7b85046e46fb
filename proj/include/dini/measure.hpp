#pragma once

#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "dini/interval.hpp"
#include "dini/quadrature.hpp"

namespace dini {

/// Masses at or below this are treated as zero when classifying cells.
inline constexpr double kMassEpsilon = 1e-12;
/// Total-mass tolerance for a probability measure.
inline constexpr double kTotalMassTolerance = 1e-9;
/// Points closer than this are considered to coincide (atoms vs. cell edges).
inline constexpr double kCoincidenceTolerance = 1e-12;

struct Atom {
  double location = 0.0;
  double mass = 0.0;
};

struct DensityComponent {
  RealFunction density;
  std::vector<double> breakpoints;
};

struct AtomicComponent {
  std::vector<Atom> atoms;
};

/// Absolutely continuous law stored as a distribution function sampled on a
/// grid (linear in between) together with the first moment of every grid cell.
struct SampledComponent {
  std::vector<double> grid;        // y_0 < y_1 < ... < y_K
  std::vector<double> cumulative;  // F(y_k), cumulative[0] == 0
  std::vector<double> moments;     // integral of v dF over (y_k, y_{k+1}]

  double cdf(double x) const;
  double density(double x) const;
};

using Component = std::variant<DensityComponent, AtomicComponent, SampledComponent>;

struct WeightedComponent {
  double weight = 1.0;
  Component component;
};

/// A probability measure on a bounded interval (lo, hi]: a density, a finite
/// set of atoms, or a weighted mixture of those. Immutable once built; every
/// factory validates total mass, atom placement and density sign.
class TargetMeasure {
 public:
  static TargetMeasure uniform(IntervalRC domain);
  static TargetMeasure density(IntervalRC domain, RealFunction f, std::vector<double> breakpoints = {});
  static TargetMeasure atomic(IntervalRC domain, std::vector<Atom> atoms);
  static TargetMeasure dirac(IntervalRC domain, double location);
  static TargetMeasure mixture(IntervalRC domain, const std::vector<std::pair<double, TargetMeasure>>& parts);
  static TargetMeasure sampled(IntervalRC domain, SampledComponent sampled);

  const IntervalRC& domain() const noexcept { return domain_; }
  std::span<const WeightedComponent> components() const noexcept { return components_; }

  /// Atom locations of all atomic components (sorted, deduplicated).
  std::vector<double> atom_locations() const;
  bool has_atoms() const { return !atom_locations().empty(); }

  /// Declarative description this measure was built from, as JSON text; empty
  /// for measures built from arbitrary callables.
  const std::string& descriptor() const noexcept { return descriptor_; }
  TargetMeasure with_descriptor(std::string descriptor) const;

 private:
  TargetMeasure(IntervalRC domain, std::vector<WeightedComponent> components);

  IntervalRC domain_;
  std::vector<WeightedComponent> components_;
  std::string descriptor_;
};

/// P(iv). Throws std::invalid_argument when iv is not inside the domain.
double measure_of(const TargetMeasure& p, const IntervalRC& iv);

/// Integral of the identity, i.e. the mean of P.
double integral_identity(const TargetMeasure& p);

/// Integral of f with respect to P.
double integrate_against(const TargetMeasure& p, const RealFunction& f, std::span<const double> f_breakpoints = {});

/// Neither endpoint of iv carries an atom of P.
bool is_continuity_interval(const TargetMeasure& p, const IntervalRC& iv);

inline constexpr std::size_t kPushforwardGrid = 4096;

/// Image measure of P under a continuous, piecewise-monotone map g.
///
/// Atoms are mapped pointwise. Absolutely continuous parts become a sampled
/// distribution function on `grid_cells + 1` equispaced points spanning the
/// range of g, with exact cell moments, so the mean of the image equals the
/// integral of g against P up to quadrature error. A g that is constant on
/// the whole domain yields a Dirac measure.
TargetMeasure pushforward(const TargetMeasure& p, const RealFunction& g, std::size_t grid_cells = kPushforwardGrid);

}  // namespace dini
