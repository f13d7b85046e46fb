#include "dini/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace dini {
namespace {

constexpr int kMaxDepth = 48;
constexpr int kInitialPanels = 8;

struct SimpsonPanel {
  double a, m, b;
  double fa, fm, fb;
  double whole;
};

double simpson(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double refine(const RealFunction& f, const SimpsonPanel& p, double eps, int depth) {
  const double lm = 0.5 * (p.a + p.m);
  const double rm = 0.5 * (p.m + p.b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(p.a, p.m, p.fa, flm, p.fm);
  const double right = simpson(p.m, p.b, p.fm, frm, p.fb);
  const double delta = left + right - p.whole;
  if (depth >= kMaxDepth || std::abs(delta) <= 15.0 * eps) {
    return left + right + delta / 15.0;
  }
  return refine(f, {p.a, lm, p.m, p.fa, flm, p.fm, left}, 0.5 * eps, depth + 1) +
         refine(f, {p.m, rm, p.b, p.fm, frm, p.fb, right}, 0.5 * eps, depth + 1);
}

double integrate_piece(const RealFunction& f, double a, double b, double eps) {
  double total = 0.0;
  const double width = (b - a) / kInitialPanels;
  for (int k = 0; k < kInitialPanels; ++k) {
    const double lo = a + k * width;
    const double hi = (k + 1 == kInitialPanels) ? b : a + (k + 1) * width;
    const double mid = 0.5 * (lo + hi);
    const double flo = f(lo), fmid = f(mid), fhi = f(hi);
    total += refine(f, {lo, mid, hi, flo, fmid, fhi, simpson(lo, hi, flo, fmid, fhi)},
                    eps / kInitialPanels, 0);
  }
  return total;
}

}  // namespace

double integrate(const RealFunction& f, double a, double b, double abs_tol,
                 std::span<const double> breakpoints) {
  if (a == b) return 0.0;
  if (a > b) return -integrate(f, b, a, abs_tol, breakpoints);

  std::vector<double> edges{a};
  for (double x : breakpoints) {
    if (a < x && x < b) edges.push_back(x);
  }
  edges.push_back(b);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  // Piece endpoints are nudged inward so a jump at a breakpoint is seen from
  // the correct side.
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    const double lo = edges[k];
    const double hi = edges[k + 1];
    const double share = abs_tol * (hi - lo) / (b - a);
    if (edges.size() > 2) {
      const double inner_lo = std::nextafter(lo, hi);
      const double inner_hi = std::nextafter(hi, lo);
      const RealFunction inner = [&](double x) { return f(std::clamp(x, inner_lo, inner_hi)); };
      total += integrate_piece(inner, lo, hi, share);
    } else {
      total += integrate_piece(f, lo, hi, share);
    }
  }
  return total;
}

}  // namespace dini
