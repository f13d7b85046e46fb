#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dini/mean_function.hpp"
#include "dini/measure.hpp"
#include "dini/planner.hpp"
#include "dini/pool.hpp"

namespace dini {

/// A configuration problem, tagged with the dotted path of the offending field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error("field '" + field + "': " + message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Declarative blocks. `where` is the dotted path used in error messages.
MeanFunction mean_from_config(const nlohmann::json& block, double horizon, const std::string& where = "mean");
PoolScheme scheme_from_config(const nlohmann::json& block, const std::string& where = "pool");
TargetMeasure target_from_config(const nlohmann::json& block, const IntervalRC& default_domain,
                                 const std::string& where = "target");
/// Inverse of target_from_config for measures that carry a descriptor.
nlohmann::json target_to_config(const TargetMeasure& p);

enum class PlanningSpace { Time, Mark };

struct PlannerSpec {
  PlanningSpace space = PlanningSpace::Time;
  std::size_t base_level = 1;
  std::size_t n0 = RefinementSchedule::kDefaultStart;
  std::string null_slots = "squares";
  std::size_t membership_threshold = kDefaultInfinityThreshold;

  PlannerOptions options() const;
};

struct EstimatorSpec {
  enum class Kind { Global, Interval, Pointwise, Jump };
  Kind kind = Kind::Global;
  double a = 0.0;  // interval (a, b]
  double b = 0.0;
  double t = 0.0;  // pointwise / jump location

  std::string name() const;
};

struct ExperimentConfig {
  nlohmann::json source;
  double horizon = 1.0;
  MeanFunction mean = MeanFunction::constant(0.5);
  PoolScheme pool;
  std::optional<TargetMeasure> target;
  PlannerSpec planner;
  std::size_t n_max = 0;
  std::uint64_t seed = 0;
  std::vector<EstimatorSpec> estimators;
  std::string output = "out";
  std::size_t burn_in = 1024;

  /// SHA-256 of the canonical JSON text of `source`.
  std::string digest() const;
};

/// Parses and validates an experiment document. Throws ConfigError.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

}  // namespace dini
