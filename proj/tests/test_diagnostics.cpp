#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "dini/diagnostics.hpp"
#include "dini/planner.hpp"
#include "dini/pool.hpp"

using namespace dini;

namespace {

const IntervalRC kUnit(0, 1);

double gk(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-14);
}

ConvergenceTrace trace_of(std::vector<Checkpoint> cs) {
  ConvergenceTrace t;
  t.checkpoints = std::move(cs);
  return t;
}

}  // namespace

TEST(OracleLimit, Examples) {
  const TargetMeasure u = TargetMeasure::uniform(kUnit);
  EXPECT_NEAR(oracle_limit(u, MeanFunction::identity()), 0.5, 1e-12);

  const MeanFunction s(Sinusoid{0.3, 2.0, 0.4, 0.5}, 1.0);
  const double expected = gk([&](double t) { return eval_mean(s, t); }, 0.0, 1.0);
  EXPECT_NEAR(oracle_limit(u, s), expected, 1e-10);

  const TargetMeasure dirac = TargetMeasure::atomic(kUnit, {{0.37, 1.0}});
  EXPECT_DOUBLE_EQ(oracle_limit(dirac, s), eval_mean(s, 0.37));

  // linear p0 against uniform on (a, b]: the midpoint value
  const MeanFunction lin(Polynomial{{0.1, 0.6}}, 1.0);
  const TargetMeasure ab = TargetMeasure::density(kUnit, [](double t) { return t > 0.2 && t <= 0.7 ? 2.0 : 0.0; },
                                                  {0.2, 0.7});
  EXPECT_NEAR(oracle_limit(ab, lin), eval_mean(lin, 0.45), 1e-12);
}

TEST(OracleLimit, StepMeanAgainstDensity) {
  const TargetMeasure two_t = TargetMeasure::density(kUnit, [](double t) { return 2.0 * t; });
  // integral of 2t over (0.5, 1] weighted by 0.6, the rest by 0.2
  EXPECT_NEAR(oracle_limit(two_t, MeanFunction::step(0.5, 0.2, 0.6)), 0.2 * 0.25 + 0.6 * 0.75, 1e-12);
}

TEST(Rajchman, DegenerateMarksGiveZeroResidual) {
  const ObservationPool pool({0.1, 0.3, 0.6, 0.9}, MeanFunction::step(0.5, 0.0, 1.0));
  DrawLedger ledger(9);
  const PermutationPlan plan{{2, 0, 3, 1}, {}};
  for (const Checkpoint& c : rajchman_residual(plan, ledger, pool).checkpoints) EXPECT_EQ(c.value, 0.0);
}

TEST(Rajchman, ConstantMeanPinnedSeed) {
  const std::size_t n = 1 << 17;
  const ObservationPool pool = generate_pool(Equispaced{n}, MeanFunction::constant(0.5));
  DrawLedger ledger(2024);
  const ConvergenceTrace r = rajchman_residual(PermutationPlan::identity(n), ledger, pool);
  EXPECT_EQ(r.final_n(), n);
  EXPECT_LE(std::abs(r.final_value()), 0.01);
}

TEST(Rajchman, ResidualIsDifferenceOfTraces) {
  const ObservationPool pool = generate_pool(RadicalInverse{20000}, MeanFunction(Sinusoid{0.4, 3.0, 0.0, 0.5}, 1.0));
  const TargetMeasure u = TargetMeasure::uniform(kUnit);
  const PermutationPlan plan =
      build_permutation(u, pool.times(), 8000, partition_for(u, 8000, RefinementSchedule::doubling()));
  DrawLedger ledger(5);
  const ConvergenceTrace r = rajchman_residual(plan, ledger, pool);
  const ConvergenceTrace obs = running_mean(plan, ledger, pool);
  const ConvergenceTrace exp = mean_trace(plan, pool);
  ASSERT_EQ(r.checkpoints.size(), obs.checkpoints.size());
  for (std::size_t k = 0; k < r.checkpoints.size(); ++k) {
    EXPECT_EQ(r.checkpoints[k].value, obs.checkpoints[k].value - exp.checkpoints[k].value);
  }
}

TEST(TwoAtomOracle, Examples) {
  EXPECT_DOUBLE_EQ(two_atom_oracle(0.2, 0.8, 0.25, 0.75), 0.65);
  EXPECT_DOUBLE_EQ(two_atom_oracle(0.2, 0.8, 1.0, 0.0), 0.2);
  EXPECT_THROW(two_atom_oracle(0.2, 0.8, 0.5, 0.6), std::invalid_argument);
  EXPECT_THROW(two_atom_oracle(0.2, 0.8, -0.1, 1.1), std::invalid_argument);
}

TEST(TwoAtomOracle, AgreesWithAtomicMean) {
  for (double p1 : {0.1, 0.25, 0.5, 0.9}) {
    const TargetMeasure p = TargetMeasure::atomic(kUnit, {{0.2, p1}, {0.8, 1.0 - p1}});
    EXPECT_DOUBLE_EQ(two_atom_oracle(0.2, 0.8, p1, 1.0 - p1), integral_identity(p));
  }
}

TEST(ConvergenceReport, Examples) {
  const ConvergenceTrace t = trace_of({{1, 0.9}, {1024, 0.52}, {2048, 0.49}, {3000, 0.505}});
  const ConvergenceReport r = convergence_report(t, 0.5);
  EXPECT_DOUBLE_EQ(r.final_value, 0.505);
  EXPECT_NEAR(r.final_error, 0.005, 1e-15);
  EXPECT_NEAR(r.sup_error_after_burn_in, 0.02, 1e-15);
  EXPECT_EQ(r.checkpoints.size(), 4u);

  const ConvergenceReport all = convergence_report(t, 0.5, 1);
  EXPECT_NEAR(all.sup_error_after_burn_in, 0.4, 1e-15);

  EXPECT_THROW(convergence_report(t, 0.5, 5000), std::invalid_argument);
  EXPECT_THROW(convergence_report(ConvergenceTrace{}, 0.5), std::invalid_argument);
}

TEST(ConvergenceReport, AlternatingMarksSupBound) {
  const std::size_t n = 1 << 14;
  const ObservationPool pool =
      generate_pool(Equispaced{n}, MeanFunction(Sinusoid{0.3, (n + 1) / 2.0, M_PI / 2, 0.5}, 1.0));
  const ConvergenceTrace t = mean_trace(PermutationPlan::identity(n), pool);
  for (std::size_t burn_in : {1ul, 16ul, 1024ul}) {
    const ConvergenceReport r = convergence_report(t, 0.5, burn_in);
    EXPECT_LE(r.sup_error_after_burn_in, 0.3 / static_cast<double>(burn_in) + 1e-9);
  }
}

TEST(ConvergenceReport, CsvAndSummary) {
  const ConvergenceReport r = convergence_report(trace_of({{1024, 0.25}, {2000, 0.5}}), 0.5);
  const CsvTable csv = report_csv(r);
  EXPECT_EQ(csv.header, (std::vector<std::string>{"n", "value", "oracle", "abs_error"}));
  ASSERT_EQ(csv.rows.size(), 2u);
  EXPECT_EQ(csv.rows[0], (std::vector<std::string>{"1024", "0.25", "0.5", "0.25"}));
  const std::string s = report_summary("global", r);
  EXPECT_NE(s.find("[global]"), std::string::npos);
  EXPECT_NE(s.find("n >= 1024"), std::string::npos);
}

TEST(DiagnosticsProperties, PushforwardCommutesWithOracle) {
  const TargetMeasure u = TargetMeasure::uniform(kUnit);
  const TargetMeasure two_t = TargetMeasure::density(kUnit, [](double t) { return 2.0 * t; });
  const TargetMeasure mix = TargetMeasure::mixture(
      kUnit, {{0.6, two_t}, {0.4, TargetMeasure::atomic(kUnit, {{0.3, 0.5}, {0.7, 0.5}})}});
  const std::vector<MeanFunction> maps = {
      MeanFunction::identity(),
      MeanFunction(Polynomial{{0.1, 0.2, 0.5}}, 1.0),
      MeanFunction(Sinusoid{0.3, 1.5, 0.2, 0.5}, 1.0),
      MeanFunction(Tabulated{{0.0, 0.4, 1.0}, {0.2, 0.9, 0.1}}, 1.0),
  };
  for (const TargetMeasure& p : {u, two_t, mix}) {
    for (const MeanFunction& f : maps) {
      const TargetMeasure image = pushforward(p, [&](double t) { return f.value(t); });
      EXPECT_NEAR(oracle_limit(p, f), integral_identity(image), 1e-8) << p.descriptor();
    }
  }
}
