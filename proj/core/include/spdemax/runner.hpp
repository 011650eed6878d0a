#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

// Config-driven experiment runner. Experiments are registered in a fixed
// table; each one wires library operations into a reproducible check with
// CSV artifacts and a machine-readable summary. Identical configs reproduce
// byte-identical outputs.

namespace spdemax::runner {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnknownExperimentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Flat key-value configuration with typed access. Key names carry explicit
/// units/meaning (horizon_T, dx_exp, n_samples, ...). Unknown keys are
/// rejected up front.
struct ExperimentConfig {
  std::string experiment;
  std::uint64_t master_seed = 1;
  std::string out_dir = "out";
  long n_paths = -1;  // override of the experiment's sample count, -1 = default
  bool quick = false;
  std::map<std::string, std::string> extra;

  double get_double(const std::string& key, double fallback) const;
  long get_long(const std::string& key, long fallback) const;

  /// Sample-count helper honoring --paths and --quick.
  std::size_t samples(std::size_t full, std::size_t quick_n) const;
};

/// Parses "key = value" lines ('#' comments); validates keys and value
/// syntax. Later files/flags override earlier values.
void apply_config_file(ExperimentConfig& cfg, const std::string& path);

struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct ExperimentResult {
  std::string experiment;
  std::vector<CheckResult> checks;
  std::vector<std::string> artifacts;

  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

using ExperimentFn = ExperimentResult (*)(const ExperimentConfig&);

struct ExperimentInfo {
  const char* name;
  const char* anchor;   // short tag tying the experiment to its statement
  const char* summary;  // what the experiment checks
  ExperimentFn fn;
};

/// Fixed-order experiment table.
const std::vector<ExperimentInfo>& registry();

/// One line per experiment: name, anchor, summary. Stable ordering.
std::string list_experiments();

/// Runs one experiment, writes its CSV artifacts and
/// <out_dir>/<name>_summary.json, and returns the structured result.
/// Throws UnknownExperimentError / ConfigError for bad requests.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Full CLI entry point (flags: --experiment, --config, --seed, --out,
/// --paths, --quick, --list). Returns 0 when all checks pass, 1 when any
/// check fails, 2 for configuration errors.
int cli_main(int argc, char** argv);

}  // namespace spdemax::runner
