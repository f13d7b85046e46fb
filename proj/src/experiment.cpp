#include "dini/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dini/estimators.hpp"
#include "dini/ledger.hpp"
#include "dini/planner.hpp"
#include "dini/pool.hpp"

namespace dini {
namespace {

namespace fs = std::filesystem;

struct Prepared {
  ObservationPool pool;
  std::optional<ProgressivePartition> psp;
  std::span<const double> values;
};

Prepared prepare(const ExperimentConfig& c) {
  Prepared out{generate_pool(c.pool, c.mean), std::nullopt, {}};
  if (c.target) {
    out.values = c.planner.space == PlanningSpace::Time ? out.pool.times() : out.pool.marks();
    out.psp = partition_for(*c.target, c.n_max, c.planner.options().refinement);
  }
  return out;
}

// Average of marks along the plan restricted to plan times inside iv.
double restricted_plan_average(const PermutationPlan& plan, const ObservationPool& pool, const IntervalRC& iv) {
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t j : plan.indices) {
    if (iv.contains(pool.times()[j])) {
      sum += pool.marks()[j];
      ++hits;
    }
  }
  return hits ? sum / static_cast<double>(hits) : std::nan("");
}

std::pair<double, std::string> interval_oracle(const ExperimentConfig& c, const PermutationPlan& plan,
                                               const ObservationPool& pool, const IntervalRC& iv) {
  if (c.target && c.planner.space == PlanningSpace::Time) {
    const IntervalRC& d = c.target->domain();
    const double lo = std::max(iv.lo, d.lo), hi = std::min(iv.hi, d.hi);
    if (lo < hi) {
      const IntervalRC cut(lo, hi);
      const double mass = measure_of(*c.target, cut);
      if (mass > kMassEpsilon) {
        std::vector<double> breaks(c.mean.breakpoints().begin(), c.mean.breakpoints().end());
        breaks.push_back(lo);
        breaks.push_back(hi);
        std::sort(breaks.begin(), breaks.end());
        const MeanFunction& f = c.mean;
        const double num = integrate_against(
            *c.target, [&](double t) { return cut.contains(t) ? f.value(t) : 0.0; }, breaks);
        return {num / mass, "conditional_target_average"};
      }
    }
  }
  return {restricted_plan_average(plan, pool, iv), "restricted_plan_average"};
}

std::string render(CsvTable table, const std::string& digest) {
  table.comment = "config_digest=" + digest;
  return table.str();
}

ConvergenceReport score(const ConvergenceTrace& trace, double oracle, std::size_t burn_in) {
  return convergence_report(trace, oracle, std::min(burn_in, trace.final_n()));
}

}  // namespace

CsvTable Manifest::to_csv() const {
  CsvTable t;
  t.comment = "config_digest=" + config_digest;
  t.header = {"file", "bytes", "sha256"};
  for (const ManifestEntry& e : files) t.rows.push_back({e.file, std::to_string(e.bytes), e.sha256});
  return t;
}

RunArtifacts execute(const ExperimentConfig& c) {
  RunArtifacts out;
  out.config_digest = c.digest();
  const std::string& digest = out.config_digest;

  Prepared prep = prepare(c);
  const ObservationPool& pool = prep.pool;
  out.files["pool.csv"] = render(pool.to_csv(), digest);

  PermutationPlan plan = PermutationPlan::identity(c.n_max);
  if (c.target) {
    plan = build_permutation(*c.target, prep.values, c.n_max, *prep.psp, c.planner.options());
    out.files["plan.csv"] = render(plan.to_csv(prep.values), digest);
  }

  DrawLedger ledger(c.seed);
  CsvTable report;
  report.header = {"estimator", "n", "final_value", "oracle", "final_error", "sup_error_after_burn_in", "burn_in",
                   "note"};
  const auto add = [&](const std::string& name, const ConvergenceTrace& trace, double oracle, std::string note,
                       bool trace_file = true) {
    if (trace_file) out.files["trace_" + name + ".csv"] = render(trace.to_csv(oracle), digest);
    if (trace.empty() || !std::isfinite(oracle)) {
      report.rows.push_back({name, "0", "nan", format_real(oracle), "nan", "nan", "0", note + ";no_data"});
      return;
    }
    const ConvergenceReport r = score(trace, oracle, c.burn_in);
    report.rows.push_back({name, std::to_string(trace.final_n()), format_real(r.final_value), format_real(r.oracle),
                           format_real(r.final_error), format_real(r.sup_error_after_burn_in),
                           std::to_string(r.burn_in), note});
    out.outcomes.push_back({name, r, std::move(note)});
  };

  for (const EstimatorSpec& e : c.estimators) {
    switch (e.kind) {
      case EstimatorSpec::Kind::Global: {
        const ConvergenceTrace trace = running_mean(plan, ledger, pool);
        if (!c.target) {
          add(e.name(), trace, mean_trace(plan, pool).final_value(), "plan_mark_average");
        } else if (c.planner.space == PlanningSpace::Time) {
          add(e.name(), trace, oracle_limit(*c.target, c.mean), "integral_of_mean_against_target");
        } else {
          add(e.name(), trace, integral_identity(*c.target), "first_moment_of_target");
        }
        break;
      }
      case EstimatorSpec::Kind::Interval: {
        const IntervalRC iv(e.a, e.b);
        const IntervalFrequency freq = interval_frequency(plan, ledger, pool, iv);
        const auto [oracle, note] = interval_oracle(c, plan, pool, iv);
        add(e.name(), freq.trace, oracle, note + ";count_ratio=" + format_real(freq.count_ratio()));
        break;
      }
      case EstimatorSpec::Kind::Pointwise:
        add(e.name(), pointwise_estimate(e.t, pool, ledger, c.n_max), eval_mean(c.mean, e.t), "mean_at_point");
        break;
      case EstimatorSpec::Kind::Jump:
        add(e.name(), jump_estimate(e.t, pool, ledger, c.n_max), eval_mean(c.mean, e.t) - left_limit(c.mean, e.t),
            "jump_of_mean");
        break;
    }
  }
  add("rajchman", rajchman_residual(plan, ledger, pool), 0.0, "running_mean_minus_mean_trace",
      false);

  out.files["ledger.csv"] = render(ledger.to_csv(pool), digest);
  out.files["report.csv"] = render(report, digest);
  return out;
}

Manifest run(const ExperimentConfig& c, const std::optional<std::string>& output_dir) {
  const RunArtifacts artifacts = execute(c);
  Manifest m;
  m.directory = output_dir.value_or(c.output);
  m.config_digest = artifacts.config_digest;
  for (const auto& [name, contents] : artifacts.files) {
    m.files.push_back({name, sha256_hex(contents), contents.size()});
  }

  fs::create_directories(m.directory);
  const auto write = [&](const std::string& name, const std::string& contents) {
    std::ofstream f(fs::path(m.directory) / name, std::ios::binary);
    f << contents;
    if (!f) throw std::runtime_error("cannot write " + (fs::path(m.directory) / name).string());
  };
  for (const auto& [name, contents] : artifacts.files) write(name, contents);
  write("manifest.csv", m.to_csv().str());
  return m;
}

double DivergenceReport::max_oracle_divergence() const {
  double d = 0.0;
  for (const DivergenceRow& r : rows) d = std::max(d, std::abs(r.oracle_a - r.oracle_b));
  return d;
}

double DivergenceReport::max_final_divergence() const {
  double d = 0.0;
  for (const DivergenceRow& r : rows) d = std::max(d, std::abs(r.final_a - r.final_b));
  return d;
}

CsvTable DivergenceReport::to_csv() const {
  CsvTable t;
  t.header = {"estimator", "final_a", "oracle_a", "final_b", "oracle_b", "final_divergence", "oracle_divergence"};
  for (const DivergenceRow& r : rows) {
    t.rows.push_back({r.estimator, format_real(r.final_a), format_real(r.oracle_a), format_real(r.final_b),
                      format_real(r.oracle_b), format_real(std::abs(r.final_a - r.final_b)),
                      format_real(std::abs(r.oracle_a - r.oracle_b))});
  }
  return t;
}

std::string DivergenceReport::table() const {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-24s %12s %12s %12s %12s %12s\n", "estimator", "final_a", "oracle_a", "final_b",
                "oracle_b", "|oracle_d|");
  out << line;
  for (const DivergenceRow& r : rows) {
    std::snprintf(line, sizeof(line), "%-24s %12.6f %12.6f %12.6f %12.6f %12.6f\n", r.estimator.c_str(), r.final_a,
                  r.oracle_a, r.final_b, r.oracle_b, std::abs(r.oracle_a - r.oracle_b));
    out << line;
  }
  for (const std::string& name : only_a) out << name << ": only in run a\n";
  for (const std::string& name : only_b) out << name << ": only in run b\n";
  return out.str();
}

namespace {

std::map<std::string, std::pair<double, double>> read_report(const std::string& dir) {
  const fs::path path = fs::path(dir) / "report.csv";
  std::ifstream in(path);
  if (!in) throw ArtifactError("missing artifact " + path.string() + " (run the experiment first)");
  std::stringstream buf;
  buf << in.rdbuf();
  const CsvTable t = parse_csv(buf.str());
  const auto column = [&](const std::string& name) {
    const auto it = std::find(t.header.begin(), t.header.end(), name);
    if (it == t.header.end()) throw ArtifactError(path.string() + " has no column " + name);
    return static_cast<std::size_t>(it - t.header.begin());
  };
  const std::size_t ce = column("estimator"), cf = column("final_value"), co = column("oracle");
  std::map<std::string, std::pair<double, double>> out;
  for (const auto& row : t.rows) {
    if (row.size() != t.header.size()) throw ArtifactError(path.string() + " has a malformed row");
    out[row[ce]] = {std::stod(row[cf]), std::stod(row[co])};
  }
  return out;
}

}  // namespace

DivergenceReport compare_directories(const std::string& dir_a, const std::string& dir_b) {
  const auto a = read_report(dir_a);
  const auto b = read_report(dir_b);
  DivergenceReport out;
  for (const auto& [name, va] : a) {
    const auto it = b.find(name);
    if (it == b.end()) {
      out.only_a.push_back(name);
      continue;
    }
    out.rows.push_back({name, va.first, va.second, it->second.first, it->second.second});
  }
  for (const auto& [name, vb] : b) {
    if (!a.count(name)) out.only_b.push_back(name);
  }
  return out;
}

DivergenceReport compare(const ExperimentConfig& a, const ExperimentConfig& b) {
  return compare_directories(a.output, b.output);
}

void validate(const ExperimentConfig& c) {
  const Prepared prep = prepare(c);
  if (c.target) check_plan_inputs(*c.target, prep.values, c.n_max, *prep.psp, c.planner.options());
}

}  // namespace dini
