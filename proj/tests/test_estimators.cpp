#include <gtest/gtest.h>

#include <cmath>

#include "dini/empirical.hpp"
#include "dini/estimators.hpp"
#include "dini/planner.hpp"
#include "dini/pool.hpp"

using namespace dini;

namespace {

const IntervalRC kUnit(0, 1);

PermutationPlan uniform_plan(const ObservationPool& pool, std::size_t n) {
  const TargetMeasure u = TargetMeasure::uniform(kUnit);
  return build_permutation(u, pool.times(), n, partition_for(u, n, RefinementSchedule::doubling()));
}

}  // namespace

TEST(Checkpoints, PowersOfTwoAndFinal) {
  const ObservationPool pool = generate_pool(Equispaced{100}, MeanFunction::constant(0.4));
  const ConvergenceTrace t = mean_trace(PermutationPlan::identity(100), pool);
  std::vector<std::size_t> ns;
  for (const Checkpoint& c : t.checkpoints) ns.push_back(c.n);
  EXPECT_EQ(ns, (std::vector<std::size_t>{1, 2, 4, 8, 16, 32, 64, 100}));
  for (const Checkpoint& c : t.checkpoints) EXPECT_NEAR(c.value, 0.4, 1e-14);
  const CsvTable csv = t.to_csv(0.5);
  EXPECT_EQ(csv.header, (std::vector<std::string>{"n", "value", "oracle", "abs_error"}));
  EXPECT_EQ(csv.rows.back()[0], "100");
}

TEST(RunningMean, DegenerateMarks) {
  const ObservationPool ones = generate_pool(Equispaced{300}, MeanFunction::constant(1.0));
  const ObservationPool zeros = generate_pool(Equispaced{300}, MeanFunction::constant(0.0));
  DrawLedger a(1), b(1);
  for (const Checkpoint& c : running_mean(PermutationPlan::identity(300), a, ones).checkpoints) {
    EXPECT_EQ(c.value, 1.0);
  }
  for (const Checkpoint& c : running_mean(PermutationPlan::identity(300), b, zeros).checkpoints) {
    EXPECT_EQ(c.value, 0.0);
  }
}

TEST(MeanTrace, AlternatingMarksPartialSums) {
  // marks 0.2, 0.8, 0.2, ... in index order
  const std::size_t n = 4000;
  const ObservationPool pool =
      generate_pool(Equispaced{n}, MeanFunction(Sinusoid{0.3, (n + 1) / 2.0, M_PI / 2, 0.5}, 1.0));
  const ConvergenceTrace t = mean_trace(PermutationPlan::identity(n), pool);
  for (const Checkpoint& c : t.checkpoints) {
    // closed form: even k -> 0.5, odd k -> 0.5 - 0.3/k
    const double expected = c.n % 2 == 0 ? 0.5 : 0.5 - 0.3 / static_cast<double>(c.n);
    EXPECT_NEAR(c.value, expected, 1e-9) << c.n;
    EXPECT_LE(std::abs(c.value - 0.5), 0.3 / static_cast<double>(c.n) + 1e-9);
  }
}

TEST(MeanTrace, UniformPlanOnLinearMean) {
  const ObservationPool pool = generate_pool(RadicalInverse{200000}, MeanFunction::identity());
  const ConvergenceTrace t = mean_trace(uniform_plan(pool, 1 << 15), pool);
  EXPECT_NEAR(t.final_value(), 0.5, 0.01);
}

TEST(IntervalFrequency, ConstantOneAndSkippedCheckpoints) {
  const ObservationPool pool = generate_pool(Equispaced{999}, MeanFunction::constant(1.0));
  DrawLedger ledger(2);
  // equispaced times in index order: the first hit in (0.9, 1] comes at step 900
  const IntervalFrequency f = interval_frequency(PermutationPlan::identity(999), ledger, pool, IntervalRC(0.9, 1.0));
  EXPECT_EQ(f.skipped, (std::vector<std::size_t>{1, 2, 4, 8, 16, 32, 64, 128, 256, 512}));
  ASSERT_EQ(f.trace.checkpoints.size(), 1u);
  EXPECT_EQ(f.trace.final_value(), 1.0);
  EXPECT_EQ(f.counts.back().hits, 99u);
  EXPECT_NEAR(f.count_ratio(), 99.0 / 999.0, 1e-15);
  EXPECT_THROW(interval_frequency(PermutationPlan::identity(10), ledger, pool, IntervalRC(0.5, 1.5)),
               std::invalid_argument);
}

TEST(IntervalFrequency, RestrictionToWholeHorizonIsRunningMean) {
  const ObservationPool pool = generate_pool(RadicalInverse{20000}, MeanFunction::identity());
  const PermutationPlan plan = uniform_plan(pool, 5000);
  DrawLedger ledger(8);
  const ConvergenceTrace full = running_mean(plan, ledger, pool);
  const IntervalFrequency restricted = interval_frequency(plan, ledger, pool, IntervalRC(0, 1));
  ASSERT_EQ(full.checkpoints.size(), restricted.trace.checkpoints.size());
  for (std::size_t k = 0; k < full.checkpoints.size(); ++k) {
    EXPECT_EQ(full.checkpoints[k].n, restricted.trace.checkpoints[k].n);
    EXPECT_EQ(full.checkpoints[k].value, restricted.trace.checkpoints[k].value);
  }
}

TEST(IntervalFrequency, DecompositionIdentityInRationals) {
  const MeanFunction f(Sinusoid{0.35, 1.5, 0.2, 0.5}, 1.0);
  const ObservationPool pool = generate_pool(RadicalInverse{40000}, f);
  const std::size_t n_max = 10000;
  const PermutationPlan plan = uniform_plan(pool, n_max);
  DrawLedger ledger(31);
  const ConvergenceTrace global = running_mean(plan, ledger, pool);
  for (std::size_t level : {1, 2, 5, 9}) {
    const ProgressivePartition psp = build_psp(kUnit, level);
    std::vector<IntervalFrequency> parts;
    for (const IntervalRC& cell : psp.cells(level)) parts.push_back(interval_frequency(plan, ledger, pool, cell));
    for (std::size_t k = 0; k < global.checkpoints.size(); ++k) {
      const std::size_t n = global.checkpoints[k].n;
      Fraction sum;
      std::size_t successes = 0;
      for (const IntervalFrequency& p : parts) {
        const IntervalCount& c = p.counts[k];
        ASSERT_EQ(c.n, n);
        successes += c.successes;
        if (c.hits == 0) continue;
        sum = sum + Fraction(static_cast<std::int64_t>(c.hits), static_cast<std::int64_t>(n)) *
                        Fraction(static_cast<std::int64_t>(c.successes), static_cast<std::int64_t>(c.hits));
      }
      const Fraction direct(static_cast<std::int64_t>(successes), static_cast<std::int64_t>(n));
      EXPECT_EQ(sum, direct) << "level " << level << " n " << n;
      EXPECT_EQ(direct.value(), global.checkpoints[k].value);
    }
  }
}

TEST(Pointwise, ConstantMean) {
  const ObservationPool pool = generate_pool(ConvergentTo{0.3, 0.1, 5000}, MeanFunction::constant(1.0));
  DrawLedger ledger(4);
  for (const Checkpoint& c : pointwise_estimate(0.3, pool, ledger).checkpoints) EXPECT_EQ(c.value, 1.0);
}

TEST(Pointwise, PoolMustConvergeToPoint) {
  const ObservationPool pool = generate_pool(ConvergentTo{0.3, 0.1, 100}, MeanFunction::identity());
  DrawLedger ledger(4);
  EXPECT_THROW(pointwise_estimate(0.4, pool, ledger), std::invalid_argument);
  const ObservationPool scan = generate_pool(RadicalInverse{100}, MeanFunction::identity());
  EXPECT_THROW(pointwise_estimate(0.3, scan, ledger), std::invalid_argument);
}

TEST(Pointwise, DeterministicBiasOfHarmonicPool) {
  const std::size_t n = 1 << 17;
  const ObservationPool pool = generate_pool(ConvergentTo{0.3, 0.1, n}, MeanFunction::identity());
  const ConvergenceTrace bias = mean_trace(PermutationPlan::identity(n), pool);
  // partial-sum oracle: 0.1 H_n / n
  double harmonic = 0.0;
  for (std::size_t j = 1; j <= n; ++j) harmonic += 1.0 / static_cast<double>(j);
  EXPECT_NEAR(bias.final_value() - 0.3, 0.1 * harmonic / n, 1e-12);
  EXPECT_LE(std::abs(bias.final_value() - 0.3), 0.001);
}

TEST(Jump, ContinuousMeanHasNoJump) {
  const ObservationPool pool = generate_pool(TwoSided{0.5, 0.1, 1 << 15}, MeanFunction::identity());
  DrawLedger ledger(6);
  EXPECT_NEAR(jump_estimate(0.5, pool, ledger).final_value(), 0.0, 0.03);
}

TEST(Jump, ConstantMeanGivesExactZeroMeanTrace) {
  const ObservationPool pool = generate_pool(TwoSided{0.5, 0.1, 2000}, MeanFunction::constant(0.37));
  const SidedIndices sides = split_sides(pool, 0.5);
  const ConvergenceTrace r = mean_trace(PermutationPlan{sides.right, {}}, pool);
  const ConvergenceTrace l = mean_trace(PermutationPlan{sides.left, {}}, pool);
  for (std::size_t k = 0; k < r.checkpoints.size(); ++k) EXPECT_EQ(r.checkpoints[k].value - l.checkpoints[k].value, 0.0);
}

TEST(Jump, LinearityAgainstSideTraces) {
  const ObservationPool pool = generate_pool(TwoSided{0.5, 0.2, 8000}, MeanFunction::step(0.5, 0.2, 0.6));
  const SidedIndices sides = split_sides(pool, 0.5);
  ASSERT_EQ(sides.right.size(), 4000u);
  DrawLedger ledger(77);
  const ConvergenceTrace jump = jump_estimate(0.5, pool, sides.right, sides.left, ledger);
  const ConvergenceTrace r = running_mean(PermutationPlan{sides.right, {}}, ledger, pool);
  const ConvergenceTrace l = running_mean(PermutationPlan{sides.left, {}}, ledger, pool);
  ASSERT_EQ(jump.checkpoints.size(), r.checkpoints.size());
  for (std::size_t k = 0; k < jump.checkpoints.size(); ++k) {
    EXPECT_EQ(jump.checkpoints[k].value, r.checkpoints[k].value - l.checkpoints[k].value);
  }
}

TEST(Jump, OverlappingSidesAreRejected) {
  const ObservationPool pool = generate_pool(TwoSided{0.5, 0.2, 100}, MeanFunction::identity());
  DrawLedger ledger(1);
  const std::vector<std::size_t> right = {0, 2, 4}, left = {1, 3, 0};
  EXPECT_THROW(jump_estimate(0.5, pool, right, left, ledger), DoubleDrawError);
  const std::vector<std::size_t> wrong_side = {1, 3};
  EXPECT_THROW(jump_estimate(0.5, pool, wrong_side, std::vector<std::size_t>{5, 7}, ledger), std::invalid_argument);
  EXPECT_EQ(ledger.size(), 0u);
}
