// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dini/diagnostics.hpp"
#include "dini/empirical.hpp"
#include "dini/estimators.hpp"
#include "dini/planner.hpp"
#include "dini/pool.hpp"
#include "reference_planner.hpp"

using namespace dini;
namespace fs = std::filesystem;

namespace {

constexpr std::size_t kN = 1 << 17;
const IntervalRC kUnit(0, 1);
const std::vector<std::uint64_t> kSeeds = {7, 2024};

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Check {
 public:
  void require(bool ok, const std::string& what) {
    if (!ok) {
      out_.pass = false;
      if (failures_++ < 4) note("FAILED " + what);
    }
  }
  void near(double value, double expected, double tol, const std::string& what) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%s=%.6g (target %.6g, tol %g)", what.c_str(), value, expected, tol);
    const bool ok = std::abs(value - expected) <= tol;
    if (ok) note(buf);
    require(ok, buf);
  }
  void at_most(double value, double bound, const std::string& what) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%s=%.6g (bound %g)", what.c_str(), value, bound);
    const bool ok = value <= bound;
    if (ok) note(buf);
    require(ok, buf);
  }
  void note(const std::string& s) { out_.detail += (out_.detail.empty() ? "" : "; ") + s; }
  Outcome result() const { return out_; }

 private:
  Outcome out_;
  std::size_t failures_ = 0;
};

TargetMeasure two_t() {
  return TargetMeasure::density(kUnit, [](double t) { return 2.0 * t; });
}

PermutationPlan plan_for(const TargetMeasure& p, std::span<const double> values, std::size_t n) {
  return build_permutation(p, values, n, partition_for(p, n, RefinementSchedule::doubling()));
}

// Residuals collected by the pinned-seed criteria, checked together later.
struct Residual {
  std::string run;
  double value;
};
std::vector<Residual> g_residuals;

void record_residual(const std::string& run, const ConvergenceTrace& observed, const ConvergenceTrace& expected) {
  g_residuals.push_back({run, observed.final_value() - expected.final_value()});
}

Outcome vague_convergence() {
  Check c;
  const TargetMeasure u = TargetMeasure::uniform(kUnit);
  const std::vector<double> times = generate_times(RadicalInverse{200000}, 1.0);
  const ProgressivePartition psp = partition_for(u, kN, RefinementSchedule::doubling());
  const PermutationPlan plan = build_permutation(u, times, kN, psp);
  std::vector<double> marks;
  for (std::size_t j : plan.indices) marks.push_back(times[j]);
  const PseudoEmpiricalMeasure e(marks);
  c.at_most(vague_discrepancy(e, u, psp, 4), 0.01, "disc(<=4)");
  c.at_most(vague_discrepancy(e, u, psp, 6), 0.05, "disc(<=6)");
  c.require(build_permutation(u, times, kN, psp).indices == plan.indices, "rerun reproduces the plan");
  return c.result();
}

Outcome riemann_dini() {
  Check c;
  const ObservationPool pool = generate_pool(RadicalInverse{1 << 19}, MeanFunction::identity());
  const PermutationPlan uniform = plan_for(TargetMeasure::uniform(kUnit), pool.times(), kN);
  const PermutationPlan skewed = plan_for(two_t(), pool.times(), kN);
  for (std::uint64_t seed : kSeeds) {
    DrawLedger ledger(seed);
    const ConvergenceTrace a = running_mean(uniform, ledger, pool);
    const ConvergenceTrace b = running_mean(skewed, ledger, pool);
    const std::string s = "seed " + std::to_string(seed);
    c.near(a.final_value(), 0.5, 0.02, s + " uniform");
    c.near(b.final_value(), 2.0 / 3.0, 0.02, s + " 2t");
    c.require(b.final_value() - a.final_value() >= 0.1, s + " finals differ by >= 0.1");
    record_residual("riemann-dini uniform " + s, a, mean_trace(uniform, pool));
    record_residual("riemann-dini 2t " + s, b, mean_trace(skewed, pool));
  }
  return c.result();
}

Outcome interval_average() {
  Check c;
  const ObservationPool pool = generate_pool(RadicalInverse{200000}, MeanFunction::identity());
  const PermutationPlan plan = plan_for(TargetMeasure::uniform(kUnit), pool.times(), kN);
  for (std::uint64_t seed : kSeeds) {
    DrawLedger ledger(seed);
    const IntervalFrequency f = interval_frequency(plan, ledger, pool, IntervalRC(0.2, 0.5));
    const std::string s = "seed " + std::to_string(seed);
    c.near(f.trace.final_value(), 0.35, 0.02, s + " mean");
    c.near(f.count_ratio(), 0.3, 0.02, s + " count ratio");
    record_residual("interval " + s, running_mean(plan, ledger, pool), mean_trace(plan, pool));
  }
  return c.result();
}

Outcome pointwise() {
  Check c;
  const ObservationPool pool = generate_pool(ConvergentTo{0.3, 0.1, kN}, MeanFunction::identity());
  const ConvergenceTrace bias = mean_trace(PermutationPlan::identity(kN), pool);
  c.at_most(std::abs(bias.final_value() - 0.3), 0.001, "|bias|");
  for (std::uint64_t seed : kSeeds) {
    DrawLedger ledger(seed);
    const ConvergenceTrace est = pointwise_estimate(0.3, pool, ledger);
    c.near(est.final_value(), 0.3, 0.02, "seed " + std::to_string(seed));
    record_residual("pointwise seed " + std::to_string(seed), est, bias);
  }
  return c.result();
}

Outcome jump() {
  Check c;
  const ObservationPool pool = generate_pool(TwoSided{0.5, 0.2, 2 * kN}, MeanFunction::step(0.5, 0.2, 0.6));
  const SidedIndices sides = split_sides(pool, 0.5);
  c.require(sides.right.size() == kN && sides.left.size() == kN, "2^17 times per side");
  const PermutationPlan right{sides.right, {}}, left{sides.left, {}};
  for (std::uint64_t seed : kSeeds) {
    DrawLedger ledger(seed);
    const std::string s = "seed " + std::to_string(seed);
    c.near(jump_estimate(0.5, pool, ledger).final_value(), 0.4, 0.03, s);
    record_residual("jump right " + s, running_mean(right, ledger, pool), mean_trace(right, pool));
    record_residual("jump left " + s, running_mean(left, ledger, pool), mean_trace(left, pool));
  }
  return c.result();
}

Outcome two_atom_example() {
  Check c;
  const std::size_t pool_size = 2 * kN;
  const MeanFunction alternating(Sinusoid{0.3, (pool_size + 1) / 2.0, M_PI / 2, 0.5}, 1.0);
  const ObservationPool pool = generate_pool(Equispaced{pool_size}, alternating);
  const TargetMeasure target = TargetMeasure::atomic(kUnit, {{0.2, 0.25}, {0.8, 0.75}});
  const PermutationPlan plan = plan_for(target, pool.marks(), kN);
  const ConvergenceTrace expected = mean_trace(plan, pool);
  const double oracle = two_atom_oracle(0.2, 0.8, 0.25, 0.75);
  c.near(expected.final_value(), oracle, 0.005, "mean trace");
  for (std::uint64_t seed : kSeeds) {
    DrawLedger ledger(seed);
    const ConvergenceTrace observed = running_mean(plan, ledger, pool);
    c.near(observed.final_value(), oracle, 0.02, "seed " + std::to_string(seed));
    record_residual("two-atom seed " + std::to_string(seed), observed, expected);
  }
  return c.result();
}

Outcome rajchman() {
  Check c;
  c.require(!g_residuals.empty(), "pinned-seed runs recorded residuals");
  double worst = 0.0;
  for (const Residual& r : g_residuals) {
    worst = std::max(worst, std::abs(r.value));
    c.require(std::abs(r.value) <= 0.01, r.run);
  }
  c.at_most(worst, 0.01, "max |residual| over " + std::to_string(g_residuals.size()) + " runs");
  return c.result();
}

Outcome oracle_equivalence() {
  Check c;
  std::size_t instances = 0, picks = 0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const reference::Instance in = reference::random_instance(seed);
    PlannerOptions o;
    o.refinement = RefinementSchedule::doubling(in.base_level, in.n0);
    const ProgressivePartition psp = partition_for(in.target, in.steps, o.refinement);
    Planner planner(in.target, in.values, psp, o);
    reference::GreedyPlanner oracle(in.target, in.values, psp, in.base_level, in.n0, true);
    bool same = true;
    for (std::size_t s = 0; s < in.steps && same; ++s) {
      const std::optional<std::size_t> expected = oracle.next();
      if (!expected) {
        try {
          planner.next_index();
          same = false;
        } catch (const ExhaustionError&) {
        }
        break;
      }
      same = planner.next_index() == *expected;
      ++picks;
    }
    ++instances;
    c.require(same, "instance seed " + std::to_string(seed));
  }
  c.note(std::to_string(instances) + " instances, " + std::to_string(picks) + " picks matched");

  const ProgressivePartition psp = build_psp(kUnit, 2);
  std::vector<double> values;
  for (std::size_t j = 1; j <= 2000; ++j) values.push_back(j / 2001.0);
  double worst = 0.0;
  PlannerOptions fixed;
  fixed.refinement = RefinementSchedule{2, {}};
  for (int r = 2; r <= 10; ++r) {
    for (int q = 1; q < r; ++q) {
      const double p = static_cast<double>(q) / r;
      const TargetMeasure target = TargetMeasure::density(
          kUnit, [p](double t) { return t <= 0.5 ? 2 * p : 2 * (1 - p); }, {0.5});
      Planner planner(target, values, psp, fixed);
      const std::size_t left = psp.level(2)[0];
      for (std::size_t n = 1; n <= 1000; ++n) {
        planner.next_index();
        const double scaled = std::abs(static_cast<double>(planner.count(left)) / n - p) * n;
        worst = std::max(worst, scaled);
      }
    }
  }
  c.at_most(worst, 1.0 + 1e-9, "max n|C_n/n - p| (two cells)");
  return c.result();
}

Outcome null_bounds() {
  Check c;
  const TargetMeasure target = TargetMeasure::density(kUnit, [](double t) { return t <= 0.5 ? 2.0 : 0.0; }, {0.5});
  const std::vector<double> values = generate_times(RadicalInverse{1 << 19}, 1.0);
  PlannerOptions o;
  o.refinement = RefinementSchedule::doubling(2, 64);
  const ProgressivePartition psp = partition_for(target, kN, o.refinement);
  const PermutationPlan plan = build_permutation(target, values, kN, psp, o);
  // B0 at base level 2 is (0.5, 1]
  std::size_t in_null = 0;
  long worst_excess = std::numeric_limits<long>::min();
  for (std::size_t n = 1; n <= kN; ++n) {
    in_null += values[plan.indices[n - 1]] > 0.5;
    const auto root = static_cast<long>(std::sqrt(static_cast<double>(n)));
    worst_excess = std::max(worst_excess, static_cast<long>(in_null) - root);
  }
  c.at_most(static_cast<double>(worst_excess), 0.0, "max C_n(B0) - floor(sqrt n)");

  const std::size_t k = 50, horizon = 4 * k * k + k;
  const std::set<std::size_t> early(plan.indices.begin(), plan.indices.begin() + horizon);
  std::size_t null_marks = 0;
  for (std::size_t j = 0; j < k; ++j) {
    if (values[j] <= 0.5) continue;
    ++null_marks;
    c.require(early.count(j) == 1, "null index " + std::to_string(j) + " selected by step " + std::to_string(horizon));
  }
  c.note(std::to_string(null_marks) + " null marks among the first 50");
  return c.result();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome exact_identities() {
  Check c;
  // decomposition of the global frequency over the cells of a level
  const ObservationPool pool = generate_pool(RadicalInverse{200000}, MeanFunction(Sinusoid{0.35, 1.5, 0.2, 0.5}, 1.0));
  const PermutationPlan plan = plan_for(TargetMeasure::uniform(kUnit), pool.times(), kN);
  DrawLedger ledger(kSeeds[0]);
  const ConvergenceTrace global = running_mean(plan, ledger, pool);
  std::size_t compared = 0;
  for (std::size_t level : {1, 3, 8, 12}) {
    const ProgressivePartition psp = build_psp(kUnit, level);
    std::vector<IntervalFrequency> parts;
    for (const IntervalRC& cell : psp.cells(level)) parts.push_back(interval_frequency(plan, ledger, pool, cell));
    for (std::size_t k = 0; k < global.checkpoints.size(); ++k) {
      const auto n = static_cast<std::int64_t>(global.checkpoints[k].n);
      Fraction sum;
      std::int64_t successes = 0;
      for (const IntervalFrequency& p : parts) {
        const IntervalCount& cnt = p.counts[k];
        successes += static_cast<std::int64_t>(cnt.successes);
        if (cnt.hits == 0) continue;
        sum = sum + Fraction(static_cast<std::int64_t>(cnt.hits), n) *
                        Fraction(static_cast<std::int64_t>(cnt.successes), static_cast<std::int64_t>(cnt.hits));
      }
      c.require(sum == Fraction(successes, n) && Fraction(successes, n).value() == global.checkpoints[k].value,
                "decomposition at level " + std::to_string(level) + ", n=" + std::to_string(n));
      ++compared;
    }
  }
  c.note("decomposition exact at " + std::to_string(compared) + " checkpoint/level pairs");

  // the oracle commutes with pushing P forward through p0
  const TargetMeasure mix = TargetMeasure::mixture(
      kUnit, {{0.6, two_t()}, {0.4, TargetMeasure::atomic(kUnit, {{0.3, 0.5}, {0.7, 0.5}})}});
  double worst = 0.0;
  for (const TargetMeasure& p : {TargetMeasure::uniform(kUnit), two_t(), mix}) {
    for (const MeanFunction& f : {MeanFunction::identity(), MeanFunction(Polynomial{{0.1, 0.2, 0.5}}, 1.0),
                                  MeanFunction(Sinusoid{0.3, 1.5, 0.2, 0.5}, 1.0),
                                  MeanFunction(Tabulated{{0.0, 0.4, 1.0}, {0.2, 0.9, 0.1}}, 1.0)}) {
      const TargetMeasure image = pushforward(p, [&](double t) { return f.value(t); });
      worst = std::max(worst, std::abs(oracle_limit(p, f) - integral_identity(image)));
    }
  }
  c.at_most(worst, 1e-8, "max pushforward/oracle gap");

  // two CLI runs of one config produce byte-identical artifacts
  const fs::path dir = fs::temp_directory_path() / "dini_acceptance_cli";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const nlohmann::json cfg = nlohmann::json::parse(R"({
    "mean": {"kind": "sinusoid", "amplitude": 0.3, "frequency": 2, "offset": 0.5},
    "pool": {"scheme": "radical_inverse", "size": 65536},
    "target": {"kind": "density", "family": "polynomial", "coefficients": [0, 2]},
    "n_max": 16384,
    "seed": 7,
    "estimators": [{"kind": "global"}, {"kind": "interval", "a": 0.2, "b": 0.5}]
  })");
  std::ofstream(dir / "config.json") << cfg.dump(2);
  std::vector<std::string> runs = {"first", "second"};
  for (const std::string& r : runs) {
    const std::string cmd = std::string(DINI_CLI_PATH) + " run " + (dir / "config.json").string() + " -o " +
                            (dir / r).string() + " > /dev/null 2>&1";
    const int raw = std::system(cmd.c_str());
    c.require(WIFEXITED(raw) && WEXITSTATUS(raw) == 0, "cli run " + r + " exits 0");
  }
  std::size_t files = 0;
  if (fs::exists(dir / "first")) {
    for (const auto& e : fs::directory_iterator(dir / "first")) {
      const std::string name = e.path().filename().string();
      c.require(fs::exists(dir / "second" / name) && slurp(e.path()) == slurp(dir / "second" / name),
                "byte-identical " + name);
      ++files;
    }
  }
  c.require(files == 7, "seven artifacts per run");
  c.note(std::to_string(files) + " artifacts byte-identical across reruns");
  fs::remove_all(dir);
  return c.result();
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"planner vague convergence", vague_convergence},
      {"different targets, different limits", riemann_dini},
      {"interval average", interval_average},
      {"pointwise value", pointwise},
      {"jump size", jump},
      {"two-atom example", two_atom_example},
      {"running mean tracks mean trace", rajchman},
      {"greedy oracle equivalence", oracle_equivalence},
      {"null-schedule bounds", null_bounds},
      {"exact identities and determinism", exact_identities},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !o.pass;
    std::printf("%s  %2zu  %-36s %6.1fs  %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), secs,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
