#include "dini/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace dini {

double oracle_limit(const TargetMeasure& p, const MeanFunction& f) {
  return integrate_against(p, [&](double t) { return f.value(t); }, f.breakpoints());
}

ConvergenceTrace rajchman_residual(const PermutationPlan& plan, DrawLedger& ledger, const ObservationPool& pool) {
  const ConvergenceTrace observed = running_mean(plan, ledger, pool);
  const ConvergenceTrace expected = mean_trace(plan, pool);
  ConvergenceTrace out;
  for (std::size_t k = 0; k < observed.checkpoints.size(); ++k) {
    out.checkpoints.push_back(
        {observed.checkpoints[k].n, observed.checkpoints[k].value - expected.checkpoints[k].value});
  }
  return out;
}

double two_atom_oracle(double l1, double l2, double p1, double p2) {
  const bool valid = p1 >= 0.0 && p1 <= 1.0 && p2 >= 0.0 && p2 <= 1.0 && std::abs(p1 + p2 - 1.0) <= 1e-12;
  if (!valid) throw std::invalid_argument("two-atom weights must lie in [0, 1] and sum to 1");
  return p1 * l1 + p2 * l2;
}

ConvergenceReport convergence_report(const ConvergenceTrace& trace, double oracle, std::size_t burn_in) {
  if (trace.empty()) throw std::invalid_argument("empty trace");
  ConvergenceReport r;
  r.final_value = trace.final_value();
  r.oracle = oracle;
  r.final_error = std::abs(trace.final_value() - oracle);
  r.burn_in = burn_in;
  bool any = false;
  for (const Checkpoint& c : trace.checkpoints) {
    const double err = std::abs(c.value - oracle);
    r.checkpoints.push_back(c);
    if (c.n >= burn_in) {
      r.sup_error_after_burn_in = any ? std::max(r.sup_error_after_burn_in, err) : err;
      any = true;
    }
  }
  if (!any) throw std::invalid_argument("every checkpoint precedes the burn-in of " + std::to_string(burn_in));
  return r;
}

CsvTable report_csv(const ConvergenceReport& report) {
  CsvTable t;
  t.header = {"n", "value", "oracle", "abs_error"};
  for (const Checkpoint& c : report.checkpoints) {
    t.rows.push_back({std::to_string(c.n), format_real(c.value), format_real(report.oracle),
                      format_real(std::abs(c.value - report.oracle))});
  }
  return t;
}

std::string report_summary(const std::string& name, const ConvergenceReport& report) {
  std::ostringstream out;
  out << "[" << name << "]\n"
      << "  final      " << format_real(report.final_value) << "\n"
      << "  oracle     " << format_real(report.oracle) << "\n"
      << "  |error|    " << format_real(report.final_error) << "\n"
      << "  sup|error| " << format_real(report.sup_error_after_burn_in) << " (n >= " << report.burn_in << ")\n";
  return out.str();
}

}  // namespace dini
