#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "dini/experiment.hpp"

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kBadConfig = 2, kPlannerFailure = 3, kMissingArtifact = 4 };

template <class F>
int guarded(F&& body) {
  try {
    body();
    return kOk;
  } catch (const dini::ConfigError& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    return kBadConfig;
  } catch (const dini::ExhaustionError& e) {
    std::cerr << "planner exhausted: " << e.what() << '\n';
    return kPlannerFailure;
  } catch (const dini::MembershipError& e) {
    std::cerr << "membership violation: " << e.what() << '\n';
    return kPlannerFailure;
  } catch (const dini::ArtifactError& e) {
    std::cerr << e.what() << '\n';
    return kMissingArtifact;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Permuted-sampling experiments for nonstationary Bernoulli processes"};
  app.require_subcommand(1);

  std::string run_config;
  std::optional<std::string> run_output;
  auto* run = app.add_subcommand("run", "Plan, draw, estimate and write CSV artifacts");
  run->add_option("config", run_config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("-o,--output", run_output, "Output directory (overrides the config)");

  std::string config_a, config_b;
  std::optional<std::string> compare_csv;
  auto* compare = app.add_subcommand("compare", "Side-by-side finals and oracles of two completed runs");
  compare->add_option("config_a", config_a, "First experiment config")->required()->check(CLI::ExistingFile);
  compare->add_option("config_b", config_b, "Second experiment config")->required()->check(CLI::ExistingFile);
  compare->add_option("--csv", compare_csv, "Also write the divergence table as CSV");

  std::string validate_config;
  auto* validate = app.add_subcommand("validate", "Check a config without running it");
  validate->add_option("config", validate_config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  if (*run) {
    return guarded([&] {
      const dini::ExperimentConfig config = dini::load_config(run_config);
      const dini::Manifest m = dini::run(config, run_output);
      std::cout << "wrote " << m.files.size() + 1 << " files to " << m.directory << '\n';
      for (const auto& f : m.files) std::cout << "  " << f.sha256 << "  " << f.file << '\n';
    });
  }
  if (*compare) {
    return guarded([&] {
      const dini::DivergenceReport r = dini::compare(dini::load_config(config_a), dini::load_config(config_b));
      std::cout << r.table();
      if (compare_csv) {
        std::ofstream out(*compare_csv);
        r.to_csv().write(out);
        if (!out) throw std::runtime_error("cannot write " + *compare_csv);
      }
    });
  }
  return guarded([&] {
    const dini::ExperimentConfig config = dini::load_config(validate_config);
    dini::validate(config);
    std::cout << "ok " << validate_config << " (config_digest=" << config.digest() << ")\n";
  });
}
