#include "dini/config.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <fstream>
#include <sstream>

namespace dini {
namespace {

using nlohmann::json;

std::string join(const std::string& where, const std::string& key) { return where.empty() ? key : where + "." + key; }

const json& require(const json& block, const std::string& key, const std::string& where) {
  if (!block.is_object()) throw ConfigError(where, "expected an object");
  const auto it = block.find(key);
  if (it == block.end()) throw ConfigError(join(where, key), "missing");
  return *it;
}

double number(const json& v, const std::string& field) {
  if (!v.is_number()) throw ConfigError(field, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(field, "must be finite");
  return x;
}

double number_at(const json& block, const std::string& key, const std::string& where) {
  return number(require(block, key, where), join(where, key));
}

double number_or(const json& block, const std::string& key, const std::string& where, double fallback) {
  return block.contains(key) ? number_at(block, key, where) : fallback;
}

std::size_t count_at(const json& block, const std::string& key, const std::string& where) {
  const json& v = require(block, key, where);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    throw ConfigError(join(where, key), "expected a nonnegative integer");
  }
  return v.get<std::size_t>();
}

std::size_t count_or(const json& block, const std::string& key, const std::string& where, std::size_t fallback) {
  return block.contains(key) ? count_at(block, key, where) : fallback;
}

std::string string_at(const json& block, const std::string& key, const std::string& where) {
  const json& v = require(block, key, where);
  if (!v.is_string()) throw ConfigError(join(where, key), "expected a string");
  return v.get<std::string>();
}

std::vector<double> numbers_at(const json& block, const std::string& key, const std::string& where) {
  const json& v = require(block, key, where);
  const std::string field = join(where, key);
  if (!v.is_array()) throw ConfigError(field, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<double> numbers_or(const json& block, const std::string& key, const std::string& where) {
  return block.contains(key) ? numbers_at(block, key, where) : std::vector<double>{};
}

template <class F>
auto wrap(const std::string& where, F&& build) {
  try {
    return build();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(where, e.what());
  }
}

TargetMeasure target_body(const json& block, const IntervalRC& domain, const std::string& where) {
  const std::string kind = string_at(block, "kind", where);
  if (kind == "uniform") return TargetMeasure::uniform(domain);
  if (kind == "dirac") return TargetMeasure::dirac(domain, number_at(block, "location", where));
  if (kind == "atomic") {
    const json& atoms = require(block, "atoms", where);
    const std::string field = join(where, "atoms");
    if (!atoms.is_array() || atoms.empty()) throw ConfigError(field, "expected a nonempty array of [location, mass]");
    std::vector<Atom> out;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      const std::string f = field + "[" + std::to_string(i) + "]";
      if (!atoms[i].is_array() || atoms[i].size() != 2) throw ConfigError(f, "expected [location, mass]");
      out.push_back({number(atoms[i][0], f + "[0]"), number(atoms[i][1], f + "[1]")});
    }
    return TargetMeasure::atomic(domain, std::move(out));
  }
  if (kind == "density") {
    const std::string family = string_at(block, "family", where);
    if (family == "polynomial") {
      Polynomial poly{numbers_at(block, "coefficients", where)};
      return TargetMeasure::density(domain, poly, numbers_or(block, "breakpoints", where));
    }
    if (family == "piecewise_constant") {
      const std::vector<double> edges = numbers_at(block, "edges", where);
      const std::vector<double> values = numbers_at(block, "values", where);
      if (edges.size() != values.size() + 1 || values.empty()) {
        throw ConfigError(join(where, "edges"), "needs exactly one more entry than values");
      }
      for (std::size_t i = 1; i < edges.size(); ++i) {
        if (!(edges[i - 1] < edges[i])) throw ConfigError(join(where, "edges"), "must increase strictly");
      }
      const RealFunction f = [edges, values](double x) {
        if (x <= edges.front() || x > edges.back()) return 0.0;
        const auto it = std::lower_bound(edges.begin(), edges.end(), x);
        return values[static_cast<std::size_t>(it - edges.begin()) - 1];
      };
      return TargetMeasure::density(domain, f, edges);
    }
    throw ConfigError(join(where, "family"), "unknown density family '" + family + "'");
  }
  if (kind == "mixture") {
    const json& parts = require(block, "components", where);
    const std::string field = join(where, "components");
    if (!parts.is_array() || parts.empty()) throw ConfigError(field, "expected a nonempty array");
    std::vector<std::pair<double, TargetMeasure>> out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      const std::string f = field + "[" + std::to_string(i) + "]";
      const double w = number_at(parts[i], "weight", f);
      out.emplace_back(w, wrap(f, [&] { return target_body(parts[i], domain, f); }));
    }
    return TargetMeasure::mixture(domain, out);
  }
  throw ConfigError(join(where, "kind"), "unknown target kind '" + kind + "'");
}

}  // namespace

MeanFunction mean_from_config(const json& block, double horizon, const std::string& where) {
  const std::string kind = string_at(block, "kind", where);
  MeanFunction::Kind k;
  if (kind == "polynomial") {
    k = Polynomial{numbers_at(block, "coefficients", where)};
  } else if (kind == "sinusoid") {
    k = Sinusoid{number_at(block, "amplitude", where), number_at(block, "frequency", where),
                 number_or(block, "phase", where, 0.0), number_at(block, "offset", where)};
  } else if (kind == "piecewise") {
    PiecewiseRightContinuous p;
    p.breakpoints = numbers_at(block, "breakpoints", where);
    const json& pieces = require(block, "pieces", where);
    if (!pieces.is_array()) throw ConfigError(join(where, "pieces"), "expected an array of coefficient arrays");
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      const std::string f = join(where, "pieces") + "[" + std::to_string(i) + "]";
      if (!pieces[i].is_array()) throw ConfigError(f, "expected an array of coefficients");
      std::vector<double> c;
      for (std::size_t j = 0; j < pieces[i].size(); ++j) c.push_back(number(pieces[i][j], f));
      p.pieces.push_back(Polynomial{c});
    }
    k = p;
  } else if (kind == "tabulated") {
    k = Tabulated{numbers_at(block, "grid", where), numbers_at(block, "values", where)};
  } else {
    throw ConfigError(join(where, "kind"), "unknown mean function kind '" + kind + "'");
  }
  return wrap(where, [&] { return MeanFunction(k, horizon); });
}

PoolScheme scheme_from_config(const json& block, const std::string& where) {
  const std::string scheme = string_at(block, "scheme", where);
  const std::size_t size = count_at(block, "size", where);
  if (size == 0) throw ConfigError(join(where, "size"), "must be positive");
  if (scheme == "equispaced") return Equispaced{size};
  if (scheme == "radical_inverse") return RadicalInverse{size};
  if (scheme == "convergent_to") return ConvergentTo{number_at(block, "target", where), number_at(block, "rate", where), size};
  if (scheme == "two_sided") return TwoSided{number_at(block, "target", where), number_at(block, "rate", where), size};
  if (scheme == "seeded_uniform") {
    const json& seed = require(block, "seed", where);
    if (!seed.is_number_unsigned()) throw ConfigError(join(where, "seed"), "expected a nonnegative integer");
    return SeededUniform{size, seed.get<std::uint64_t>()};
  }
  throw ConfigError(join(where, "scheme"), "unknown pool scheme '" + scheme + "'");
}

TargetMeasure target_from_config(const json& block, const IntervalRC& default_domain, const std::string& where) {
  IntervalRC domain = default_domain;
  if (block.contains("domain")) {
    const std::vector<double> d = numbers_at(block, "domain", where);
    if (d.size() != 2 || !(d[0] < d[1])) throw ConfigError(join(where, "domain"), "expected [lo, hi] with lo < hi");
    domain = IntervalRC(d[0], d[1]);
  }
  TargetMeasure p = wrap(where, [&] { return target_body(block, domain, where); });
  json descriptor = block;
  descriptor["domain"] = {domain.lo, domain.hi};
  return p.with_descriptor(descriptor.dump());
}

json target_to_config(const TargetMeasure& p) {
  if (p.descriptor().empty()) throw std::invalid_argument("measure was not built from a declarative block");
  return json::parse(p.descriptor());
}

PlannerOptions PlannerSpec::options() const {
  PlannerOptions o;
  o.refinement = RefinementSchedule::doubling(base_level, n0);
  o.null_slots = null_slots == "never" ? NullSlotSchedule::never() : NullSlotSchedule::perfect_squares();
  o.membership_threshold = membership_threshold;
  return o;
}

std::string EstimatorSpec::name() const {
  const auto g = [](double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", x);
    return std::string(buf);
  };
  switch (kind) {
    case Kind::Global:
      return "global";
    case Kind::Interval:
      return "interval_" + g(a) + "_" + g(b);
    case Kind::Pointwise:
      return "pointwise_" + g(t);
    case Kind::Jump:
      return "jump_" + g(t);
  }
  return "unknown";
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 15]);
  }
  return out;
}

std::string ExperimentConfig::digest() const { return sha256_hex(source.dump()); }

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("", "experiment config must be an object");
  static const std::vector<std::string> known = {"horizon", "mean",  "pool",       "target", "planner",
                                                 "n_max",   "seed",  "estimators", "output", "burn_in"};
  for (const auto& [key, value] : doc.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) throw ConfigError(key, "unknown field");
  }

  ExperimentConfig c;
  c.source = doc;
  c.horizon = number_or(doc, "horizon", "", 1.0);
  if (!(c.horizon > 0.0)) throw ConfigError("horizon", "must be positive");
  c.mean = mean_from_config(require(doc, "mean", ""), c.horizon);
  c.pool = scheme_from_config(require(doc, "pool", ""));

  if (doc.contains("planner")) {
    const json& p = doc["planner"];
    if (!p.is_object()) throw ConfigError("planner", "expected an object");
    if (p.contains("space")) {
      const std::string space = string_at(p, "space", "planner");
      if (space == "time") {
        c.planner.space = PlanningSpace::Time;
      } else if (space == "mark") {
        c.planner.space = PlanningSpace::Mark;
      } else {
        throw ConfigError("planner.space", "expected 'time' or 'mark'");
      }
    }
    c.planner.base_level = count_or(p, "base_level", "planner", c.planner.base_level);
    if (c.planner.base_level < 1) throw ConfigError("planner.base_level", "must be at least 1");
    c.planner.n0 = count_or(p, "n0", "planner", c.planner.n0);
    if (c.planner.n0 < 1) throw ConfigError("planner.n0", "must be at least 1");
    if (p.contains("null_slots")) {
      c.planner.null_slots = string_at(p, "null_slots", "planner");
      if (c.planner.null_slots != "squares" && c.planner.null_slots != "never") {
        throw ConfigError("planner.null_slots", "expected 'squares' or 'never'");
      }
    }
    c.planner.membership_threshold = count_or(p, "membership_threshold", "planner", c.planner.membership_threshold);
  }

  if (doc.contains("target") && !doc["target"].is_null()) {
    const IntervalRC time_domain(0.0, c.horizon);
    if (c.planner.space == PlanningSpace::Mark && !doc["target"].contains("domain")) {
      throw ConfigError("target.domain", "required when planning in mark space");
    }
    c.target = target_from_config(doc["target"], time_domain);
    if (c.planner.space == PlanningSpace::Time && !c.target->domain().within(time_domain)) {
      throw ConfigError("target.domain", "must lie inside (0, T] when planning in time space");
    }
  }

  c.n_max = count_at(doc, "n_max", "");
  if (c.n_max == 0) throw ConfigError("n_max", "must be positive");
  if (c.n_max > scheme_size(c.pool)) throw ConfigError("n_max", "exceeds the pool size");

  const json& seed = require(doc, "seed", "");
  if (!seed.is_number_unsigned()) throw ConfigError("seed", "expected a nonnegative integer");
  c.seed = seed.get<std::uint64_t>();

  c.burn_in = count_or(doc, "burn_in", "", c.burn_in);
  if (doc.contains("output")) c.output = string_at(doc, "output", "");

  const auto convergence_target = [&](const std::string& field, bool two_sided_only) {
    const PoolScheme& s = c.pool;
    if (const auto* t = std::get_if<TwoSided>(&s)) return t->target;
    if (!two_sided_only) {
      if (const auto* t = std::get_if<ConvergentTo>(&s)) return t->target;
    }
    throw ConfigError(field, two_sided_only ? "jump estimation needs a two_sided pool"
                                            : "pointwise estimation needs a convergent_to or two_sided pool");
  };

  const json& est = require(doc, "estimators", "");
  if (!est.is_array() || est.empty()) throw ConfigError("estimators", "expected a nonempty array");
  for (std::size_t i = 0; i < est.size(); ++i) {
    const std::string where = "estimators[" + std::to_string(i) + "]";
    const std::string kind = string_at(est[i], "kind", where);
    EstimatorSpec e;
    if (kind == "global") {
      e.kind = EstimatorSpec::Kind::Global;
    } else if (kind == "interval") {
      e.kind = EstimatorSpec::Kind::Interval;
      e.a = number_at(est[i], "a", where);
      e.b = number_at(est[i], "b", where);
      if (!(0.0 <= e.a && e.a < e.b && e.b <= c.horizon)) throw ConfigError(where, "interval must lie inside (0, T]");
    } else if (kind == "pointwise" || kind == "jump") {
      const bool jump = kind == "jump";
      e.kind = jump ? EstimatorSpec::Kind::Jump : EstimatorSpec::Kind::Pointwise;
      e.t = number_at(est[i], "t", where);
      if (convergence_target(join(where, "t"), jump) != e.t) {
        throw ConfigError(join(where, "t"), "pool does not converge to this point");
      }
      if (jump && 2 * c.n_max > scheme_size(c.pool)) {
        throw ConfigError("n_max", "jump estimation needs n_max draws on each side of t");
      }
    } else {
      throw ConfigError(join(where, "kind"), "unknown estimator '" + kind + "'");
    }
    for (const EstimatorSpec& other : c.estimators) {
      if (other.name() == e.name()) throw ConfigError(where, "duplicate estimator " + e.name());
    }
    c.estimators.push_back(e);
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  json doc;
  try {
    doc = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed config: ") + e.what());
  }
  return parse_config(doc);
}

}  // namespace dini
