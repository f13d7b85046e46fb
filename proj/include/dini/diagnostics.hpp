#pragma once

#include <string>
#include <vector>

#include "dini/csv.hpp"
#include "dini/estimators.hpp"
#include "dini/mean_function.hpp"
#include "dini/measure.hpp"

namespace dini {

/// Limit of the permuted frequency when the plan's times converge vaguely to
/// P: the integral of p0 against P.
double oracle_limit(const TargetMeasure& p, const MeanFunction& f);

/// Running mean minus mean trace, checkpoint by checkpoint.
ConvergenceTrace rajchman_residual(const PermutationPlan& plan, DrawLedger& ledger, const ObservationPool& pool);

/// p1 L1 + p2 L2, the limit for a two-valued pool driven to weights (p1, p2).
double two_atom_oracle(double l1, double l2, double p1, double p2);

inline constexpr std::size_t kDefaultBurnIn = 1024;

struct ConvergenceReport {
  double final_value = 0.0;
  double oracle = 0.0;
  double final_error = 0.0;
  double sup_error_after_burn_in = 0.0;
  std::size_t burn_in = kDefaultBurnIn;
  std::vector<Checkpoint> checkpoints;
};

/// Scores a trace against its oracle, counting only checkpoints with n >= burn_in
/// toward the sup error. Throws std::invalid_argument when none qualifies.
ConvergenceReport convergence_report(const ConvergenceTrace& trace, double oracle, std::size_t burn_in = kDefaultBurnIn);

/// Rows (n, value, oracle, abs_error).
CsvTable report_csv(const ConvergenceReport& report);
/// Short multi-line text block.
std::string report_summary(const std::string& name, const ConvergenceReport& report);

}  // namespace dini
