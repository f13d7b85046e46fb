#include "dini/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dini {
namespace {

constexpr std::size_t kSignCheckPoints = 4096;
constexpr std::size_t kRangeSamples = 4096;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double component_mass(const Component& c, const IntervalRC& domain) {
  return std::visit(
      Overloaded{
          [&](const DensityComponent& d) {
            return integrate(d.density, domain.lo, domain.hi, kQuadratureTolerance, d.breakpoints);
          },
          [](const AtomicComponent& a) {
            double total = 0.0;
            for (const Atom& atom : a.atoms) total += atom.mass;
            return total;
          },
          [](const SampledComponent& s) { return s.cumulative.back(); },
      },
      c);
}

void validate_component(const Component& c, const IntervalRC& domain) {
  std::visit(Overloaded{
                 [&](const DensityComponent& d) {
                   if (!d.density) throw std::invalid_argument("density component has no function");
                   std::vector<double> probes;
                   for (std::size_t k = 0; k <= kSignCheckPoints; ++k) {
                     probes.push_back(domain.lo + domain.length() * static_cast<double>(k) / kSignCheckPoints);
                   }
                   for (double b : d.breakpoints) {
                     if (domain.lo < b && b < domain.hi) {
                       probes.push_back(b);
                       probes.push_back(std::nextafter(b, domain.lo));
                     }
                   }
                   probes.front() = std::nextafter(domain.lo, domain.hi);
                   for (double x : probes) {
                     const double v = d.density(x);
                     if (!std::isfinite(v) || v < 0.0) {
                       throw std::invalid_argument("density is negative or not finite at " + std::to_string(x));
                     }
                   }
                 },
                 [&](const AtomicComponent& a) {
                   if (a.atoms.empty()) throw std::invalid_argument("atomic component has no atoms");
                   for (const Atom& atom : a.atoms) {
                     if (!(atom.mass > 0.0)) throw std::invalid_argument("atom masses must be positive");
                     if (!(domain.lo < atom.location && atom.location < domain.hi)) {
                       throw std::invalid_argument("atom at " + std::to_string(atom.location) +
                                                   " is not strictly inside the domain " + to_string(domain));
                     }
                   }
                 },
                 [&](const SampledComponent& s) {
                   const std::size_t n = s.grid.size();
                   if (n < 2 || s.cumulative.size() != n || s.moments.size() + 1 != n) {
                     throw std::invalid_argument("sampled component has inconsistent grid sizes");
                   }
                   if (s.cumulative.front() != 0.0) throw std::invalid_argument("sampled cdf must start at 0");
                   for (std::size_t k = 1; k < n; ++k) {
                     if (!(s.grid[k - 1] < s.grid[k])) throw std::invalid_argument("sampled grid not increasing");
                     if (s.cumulative[k] < s.cumulative[k - 1]) throw std::invalid_argument("sampled cdf decreasing");
                   }
                   if (s.grid.front() < domain.lo || s.grid.back() > domain.hi) {
                     throw std::invalid_argument("sampled grid exceeds the domain");
                   }
                 },
             },
             c);
}

double component_measure(const Component& c, const IntervalRC& iv) {
  return std::visit(Overloaded{
                        [&](const DensityComponent& d) {
                          return integrate(d.density, iv.lo, iv.hi, kQuadratureTolerance, d.breakpoints);
                        },
                        [&](const AtomicComponent& a) {
                          double total = 0.0;
                          for (const Atom& atom : a.atoms) {
                            if (iv.contains(atom.location)) total += atom.mass;
                          }
                          return total;
                        },
                        [&](const SampledComponent& s) { return s.cdf(iv.hi) - s.cdf(iv.lo); },
                    },
                    c);
}

// Breakpoints of an absolutely continuous component seen as a density.
std::vector<double> density_breakpoints(const Component& c) {
  if (const auto* d = std::get_if<DensityComponent>(&c)) return d->breakpoints;
  if (const auto* s = std::get_if<SampledComponent>(&c)) return s->grid;
  return {};
}

RealFunction density_of(const Component& c) {
  if (const auto* d = std::get_if<DensityComponent>(&c)) return d->density;
  if (const auto* s = std::get_if<SampledComponent>(&c)) {
    return [s](double x) { return s->density(x); };
  }
  return {};
}

}  // namespace

double SampledComponent::cdf(double x) const {
  if (x <= grid.front()) return 0.0;
  if (x >= grid.back()) return cumulative.back();
  const auto it = std::upper_bound(grid.begin(), grid.end(), x);
  const std::size_t k = static_cast<std::size_t>(it - grid.begin()) - 1;
  const double w = (x - grid[k]) / (grid[k + 1] - grid[k]);
  return cumulative[k] + w * (cumulative[k + 1] - cumulative[k]);
}

double SampledComponent::density(double x) const {
  if (x <= grid.front() || x > grid.back()) return 0.0;
  const auto it = std::lower_bound(grid.begin(), grid.end(), x);
  const std::size_t k = static_cast<std::size_t>(it - grid.begin()) - 1;
  return (cumulative[k + 1] - cumulative[k]) / (grid[k + 1] - grid[k]);
}

TargetMeasure::TargetMeasure(IntervalRC domain, std::vector<WeightedComponent> components)
    : domain_(domain), components_(std::move(components)) {
  if (components_.empty()) throw std::invalid_argument("measure has no components");
  double total = 0.0;
  for (const WeightedComponent& wc : components_) {
    if (!(wc.weight > 0.0)) throw std::invalid_argument("mixture weights must be positive");
    validate_component(wc.component, domain_);
    total += wc.weight * component_mass(wc.component, domain_);
  }
  if (std::abs(total - 1.0) > kTotalMassTolerance) {
    throw std::invalid_argument("total mass is " + std::to_string(total) + ", expected 1");
  }
}

TargetMeasure TargetMeasure::uniform(IntervalRC domain) {
  const double height = 1.0 / domain.length();
  return TargetMeasure(domain, {{1.0, DensityComponent{[height](double) { return height; }, {}}}});
}

TargetMeasure TargetMeasure::density(IntervalRC domain, RealFunction f, std::vector<double> breakpoints) {
  std::sort(breakpoints.begin(), breakpoints.end());
  return TargetMeasure(domain, {{1.0, DensityComponent{std::move(f), std::move(breakpoints)}}});
}

TargetMeasure TargetMeasure::atomic(IntervalRC domain, std::vector<Atom> atoms) {
  std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.location < b.location; });
  for (std::size_t k = 1; k < atoms.size(); ++k) {
    if (atoms[k].location == atoms[k - 1].location) throw std::invalid_argument("duplicate atom location");
  }
  return TargetMeasure(domain, {{1.0, AtomicComponent{std::move(atoms)}}});
}

TargetMeasure TargetMeasure::dirac(IntervalRC domain, double location) {
  return atomic(domain, {{location, 1.0}});
}

TargetMeasure TargetMeasure::mixture(IntervalRC domain, const std::vector<std::pair<double, TargetMeasure>>& parts) {
  std::vector<WeightedComponent> flat;
  for (const auto& [weight, part] : parts) {
    if (!part.domain().within(domain)) throw std::invalid_argument("mixture part outside the mixture domain");
    for (const WeightedComponent& wc : part.components()) flat.push_back({weight * wc.weight, wc.component});
  }
  return TargetMeasure(domain, std::move(flat));
}

TargetMeasure TargetMeasure::sampled(IntervalRC domain, SampledComponent sampled) {
  return TargetMeasure(domain, {{1.0, std::move(sampled)}});
}

TargetMeasure TargetMeasure::with_descriptor(std::string descriptor) const {
  TargetMeasure copy = *this;
  copy.descriptor_ = std::move(descriptor);
  return copy;
}

std::vector<double> TargetMeasure::atom_locations() const {
  std::vector<double> out;
  for (const WeightedComponent& wc : components_) {
    if (const auto* a = std::get_if<AtomicComponent>(&wc.component)) {
      for (const Atom& atom : a->atoms) out.push_back(atom.location);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double measure_of(const TargetMeasure& p, const IntervalRC& iv) {
  if (!iv.within(p.domain())) {
    throw std::invalid_argument("interval " + to_string(iv) + " is outside the domain " + to_string(p.domain()));
  }
  double total = 0.0;
  for (const WeightedComponent& wc : p.components()) total += wc.weight * component_measure(wc.component, iv);
  return std::clamp(total, 0.0, 1.0);
}

double integrate_against(const TargetMeasure& p, const RealFunction& f, std::span<const double> f_breakpoints) {
  const IntervalRC& dom = p.domain();
  double total = 0.0;
  for (const WeightedComponent& wc : p.components()) {
    if (const auto* a = std::get_if<AtomicComponent>(&wc.component)) {
      double sum = 0.0;
      for (const Atom& atom : a->atoms) sum += atom.mass * f(atom.location);
      total += wc.weight * sum;
      continue;
    }
    const RealFunction dens = density_of(wc.component);
    std::vector<double> breaks = density_breakpoints(wc.component);
    breaks.insert(breaks.end(), f_breakpoints.begin(), f_breakpoints.end());
    total += wc.weight * integrate([&](double x) { return f(x) * dens(x); }, dom.lo, dom.hi,
                                   kQuadratureTolerance, breaks);
  }
  return total;
}

double integral_identity(const TargetMeasure& p) {
  double total = 0.0;
  for (const WeightedComponent& wc : p.components()) {
    double part = 0.0;
    if (const auto* s = std::get_if<SampledComponent>(&wc.component)) {
      for (double m : s->moments) part += m;
    } else if (const auto* a = std::get_if<AtomicComponent>(&wc.component)) {
      for (const Atom& atom : a->atoms) part += atom.mass * atom.location;
    } else {
      const auto& d = std::get<DensityComponent>(wc.component);
      part = integrate([&](double v) { return v * d.density(v); }, p.domain().lo, p.domain().hi,
                       kQuadratureTolerance, d.breakpoints);
    }
    total += wc.weight * part;
  }
  return total;
}

bool is_continuity_interval(const TargetMeasure& p, const IntervalRC& iv) {
  for (double x : p.atom_locations()) {
    if (std::abs(x - iv.lo) <= kCoincidenceTolerance || std::abs(x - iv.hi) <= kCoincidenceTolerance) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// pushforward

namespace {

struct MonotonePiece {
  double a, b;  // [a, b] in the source domain
  int direction;  // +1 nondecreasing, -1 nonincreasing, 0 constant
};

double golden_extremum(const RealFunction& g, double a, double b, bool maximize) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  const auto better = [&](double u, double v) { return maximize ? u > v : u < v; };
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double gc = g(c), gd = g(d);
  for (int it = 0; it < 200 && (b - a) > 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(a));
       ++it) {
    if (better(gc, gd)) {
      b = d;
      d = c;
      gd = gc;
      c = b - inv_phi * (b - a);
      gc = g(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + inv_phi * (b - a);
      gd = g(d);
    }
  }
  return 0.5 * (a + b);
}

std::vector<MonotonePiece> monotone_pieces(const RealFunction& g, double lo, double hi, double scale) {
  const std::size_t n = kRangeSamples;
  std::vector<double> t(n + 1), v(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    t[i] = (i == n) ? hi : lo + (hi - lo) * static_cast<double>(i) / n;
    v[i] = g(i == 0 ? std::nextafter(lo, hi) : t[i]);
  }
  const double flat = 1e-14 * scale;
  std::vector<double> cuts{lo};
  int previous = 0;
  std::size_t last_nonzero = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double diff = v[i + 1] - v[i];
    const int sign = diff > flat ? 1 : (diff < -flat ? -1 : 0);
    if (sign == 0) continue;
    if (previous != 0 && sign != previous) {
      const double bracket_lo = t[last_nonzero];
      const double bracket_hi = t[i + 1];
      cuts.push_back(golden_extremum(g, bracket_lo, bracket_hi, previous > 0));
    }
    previous = sign;
    last_nonzero = i;
  }
  cuts.push_back(hi);

  std::vector<MonotonePiece> pieces;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double a = cuts[k], b = cuts[k + 1];
    if (!(a < b)) continue;
    const double ga = g(k == 0 ? std::nextafter(a, b) : a), gb = g(b);
    const int dir = gb - ga > flat ? 1 : (gb - ga < -flat ? -1 : 0);
    pieces.push_back({a, b, dir});
  }
  return pieces;
}

// Largest t in [a, b] with g(t) <= y for nondecreasing g (smallest for
// nonincreasing g); the preimage boundary of (-inf, y].
double preimage(const RealFunction& g, const MonotonePiece& piece, double y) {
  double a = piece.a, b = piece.b;
  const bool increasing = piece.direction > 0;
  if (increasing) {
    if (g(a) > y) return a;
    if (g(b) <= y) return b;
  } else {
    if (g(b) > y) return b;
    if (g(a) <= y) return a;
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    const bool below = g(mid) <= y;
    if (increasing == below) {
      a = mid;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

TargetMeasure pushforward(const TargetMeasure& p, const RealFunction& g, std::size_t grid_cells) {
  if (!g) throw std::invalid_argument("pushforward map is empty");
  if (grid_cells < 2) throw std::invalid_argument("pushforward grid needs at least 2 cells");
  const IntervalRC& dom = p.domain();

  double gmin = std::numeric_limits<double>::infinity();
  double gmax = -gmin;
  const auto observe = [&](double x) {
    const double y = g(x);
    if (!std::isfinite(y)) throw std::invalid_argument("map is not evaluable at " + std::to_string(x));
    gmin = std::min(gmin, y);
    gmax = std::max(gmax, y);
  };
  for (std::size_t i = 0; i <= kRangeSamples; ++i) {
    observe(i == 0 ? std::nextafter(dom.lo, dom.hi) : dom.lo + dom.length() * static_cast<double>(i) / kRangeSamples);
  }
  for (double x : p.atom_locations()) observe(x);

  const double scale = std::max({1.0, std::abs(gmin), std::abs(gmax)});
  std::vector<MonotonePiece> pieces = monotone_pieces(g, dom.lo, dom.hi, scale);
  for (const MonotonePiece& piece : pieces) {
    for (double x : {piece.a, piece.b}) {
      if (x > dom.lo) observe(x);
    }
  }

  if (gmax - gmin <= 1e-12 * scale) {
    const double c = 0.5 * (gmin + gmax);
    return TargetMeasure::dirac(IntervalRC(c - 0.5 * scale, c + 0.5 * scale), c);
  }

  const double width = gmax - gmin;
  const double pad = width / static_cast<double>(grid_cells);
  const IntervalRC image_domain(gmin - pad, gmax + pad);
  std::vector<double> grid(grid_cells + 1);
  for (std::size_t k = 0; k <= grid_cells; ++k) {
    grid[k] = (k == grid_cells) ? gmax : gmin + width * static_cast<double>(k) / grid_cells;
  }
  // Nudged so the open left end of the image keeps the lowest value inside
  // the first grid cell.
  grid.front() = std::nextafter(gmin, -std::numeric_limits<double>::infinity());

  std::vector<std::pair<double, TargetMeasure>> parts;
  const double cell_tol = kQuadratureTolerance / static_cast<double>(grid_cells);

  for (const WeightedComponent& wc : p.components()) {
    if (const auto* a = std::get_if<AtomicComponent>(&wc.component)) {
      std::vector<Atom> mapped;
      for (const Atom& atom : a->atoms) {
        const double y = g(atom.location);
        auto it = std::find_if(mapped.begin(), mapped.end(), [&](const Atom& m) { return m.location == y; });
        if (it == mapped.end()) {
          mapped.push_back({y, atom.mass});
        } else {
          it->mass += atom.mass;
        }
      }
      parts.emplace_back(wc.weight, TargetMeasure::atomic(image_domain, std::move(mapped)));
      continue;
    }

    const RealFunction dens = density_of(wc.component);
    const std::vector<double> breaks = density_breakpoints(wc.component);
    std::vector<double> cell_mass(grid_cells, 0.0);
    std::vector<double> cell_moment(grid_cells, 0.0);
    std::vector<Atom> flats;

    for (const MonotonePiece& piece : pieces) {
      if (piece.direction == 0) {
        const double mass = integrate(dens, piece.a, piece.b, kQuadratureTolerance, breaks);
        if (mass > 0.0) flats.push_back({g(piece.b), mass});
        continue;
      }
      std::vector<double> tau(grid_cells + 1);
      for (std::size_t k = 0; k <= grid_cells; ++k) tau[k] = preimage(g, piece, grid[k]);
      for (std::size_t k = 0; k < grid_cells; ++k) {
        double lo = tau[k], hi = tau[k + 1];
        if (lo > hi) std::swap(lo, hi);
        if (!(lo < hi)) continue;
        cell_mass[k] += integrate(dens, lo, hi, cell_tol, breaks);
        cell_moment[k] += integrate([&](double t) { return g(t) * dens(t); }, lo, hi, cell_tol, breaks);
      }
    }

    SampledComponent sampled;
    sampled.grid = grid;
    sampled.cumulative.assign(grid_cells + 1, 0.0);
    sampled.moments = cell_moment;
    for (std::size_t k = 0; k < grid_cells; ++k) {
      sampled.cumulative[k + 1] = sampled.cumulative[k] + std::max(0.0, cell_mass[k]);
    }
    const double continuous_mass = sampled.cumulative.back();
    double flat_mass = 0.0;
    for (const Atom& f : flats) flat_mass += f.mass;

    // Each part is normalised to a probability measure; its share of the
    // source component travels in the mixture weight.
    if (continuous_mass > 0.0) {
      for (double& c : sampled.cumulative) c /= continuous_mass;
      for (double& m : sampled.moments) m /= continuous_mass;
      parts.emplace_back(wc.weight * continuous_mass, TargetMeasure::sampled(image_domain, std::move(sampled)));
    }
    if (flat_mass > 0.0) {
      std::sort(flats.begin(), flats.end(), [](const Atom& x, const Atom& y) { return x.location < y.location; });
      std::vector<Atom> merged;
      for (const Atom& f : flats) {
        if (!merged.empty() && merged.back().location == f.location) {
          merged.back().mass += f.mass / flat_mass;
        } else {
          merged.push_back({f.location, f.mass / flat_mass});
        }
      }
      parts.emplace_back(wc.weight * flat_mass, TargetMeasure::atomic(image_domain, std::move(merged)));
    }
  }
  return TargetMeasure::mixture(image_domain, parts);
}

}  // namespace dini
