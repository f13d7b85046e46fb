#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dini/config.hpp"
#include "dini/csv.hpp"
#include "dini/diagnostics.hpp"

namespace dini {

struct ManifestEntry {
  std::string file;
  std::string sha256;
  std::size_t bytes = 0;
};

struct Manifest {
  std::string directory;
  std::string config_digest;
  std::vector<ManifestEntry> files;  // manifest.csv itself excluded

  CsvTable to_csv() const;
};

struct EstimatorOutcome {
  std::string name;
  ConvergenceReport report;
  std::string note;  // where the oracle came from
};

/// Everything a run produces, before anything touches the filesystem.
struct RunArtifacts {
  std::string config_digest;
  std::map<std::string, std::string> files;  // file name -> contents
  std::vector<EstimatorOutcome> outcomes;
};

/// Executes the pipeline in memory. Planner and estimator errors propagate.
RunArtifacts execute(const ExperimentConfig& config);

/// Executes, then writes every artifact and manifest.csv into the output
/// directory (config.output unless overridden).
Manifest run(const ExperimentConfig& config, const std::optional<std::string>& output_dir = std::nullopt);

class ArtifactError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DivergenceRow {
  std::string estimator;
  double final_a = 0.0;
  double oracle_a = 0.0;
  double final_b = 0.0;
  double oracle_b = 0.0;
};

struct DivergenceReport {
  std::vector<DivergenceRow> rows;  // estimators present in both runs
  std::vector<std::string> only_a;
  std::vector<std::string> only_b;

  /// Largest |oracle_a - oracle_b| and |final_a - final_b| over shared rows.
  double max_oracle_divergence() const;
  double max_final_divergence() const;
  CsvTable to_csv() const;
  std::string table() const;
};

/// Reads report.csv from each configuration's output directory. Throws
/// ArtifactError when a report is missing or malformed.
DivergenceReport compare(const ExperimentConfig& a, const ExperimentConfig& b);
DivergenceReport compare_directories(const std::string& dir_a, const std::string& dir_b);

/// Checks that the pool can be generated and the planner inputs are
/// consistent, without running the plan. Throws on the first problem.
void validate(const ExperimentConfig& config);

}  // namespace dini
