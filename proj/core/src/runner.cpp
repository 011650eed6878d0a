#include "spdemax/runner.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "spdemax/csv.hpp"

namespace spdemax::runner {

namespace {

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "experiment",   "master_seed",    "out_dir",      "n_paths",
      "quick",        "horizon_T",      "dx_exp",       "dt_exp",
      "n_samples",    "coeff_a",        "coeff_sigma",  "barrier_c",
      "barrier_d",    "diffusion_delta", "exponent_p",  "exponent_theta",
      "exponent_mu",  "exponent_alpha", "strip_m_max",  "store_every",
  };
  return keys;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' has non-numeric value '" +
                      value + "'");
  }
}

}  // namespace

double ExperimentConfig::get_double(const std::string& key,
                                    double fallback) const {
  const auto it = extra.find(key);
  if (it == extra.end()) return fallback;
  return parse_double(key, it->second);
}

long ExperimentConfig::get_long(const std::string& key, long fallback) const {
  const auto it = extra.find(key);
  if (it == extra.end()) return fallback;
  const double v = parse_double(key, it->second);
  return static_cast<long>(v);
}

std::size_t ExperimentConfig::samples(std::size_t full,
                                      std::size_t quick_n) const {
  if (n_paths > 0) return static_cast<std::size_t>(n_paths);
  return quick ? quick_n : full;
}

void apply_config_file(ExperimentConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: line " + std::to_string(lineno) +
                        " is not 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (std::find(known_keys().begin(), known_keys().end(), key) ==
        known_keys().end())
      throw ConfigError("config: unknown key '" + key + "'");
    if (key == "experiment") {
      cfg.experiment = value;
    } else if (key == "master_seed") {
      cfg.master_seed = static_cast<std::uint64_t>(parse_double(key, value));
    } else if (key == "out_dir") {
      cfg.out_dir = value;
    } else if (key == "n_paths") {
      cfg.n_paths = static_cast<long>(parse_double(key, value));
    } else if (key == "quick") {
      cfg.quick = value == "1" || value == "true" || value == "yes";
    } else {
      parse_double(key, value);  // typed validation up front
      cfg.extra[key] = value;
    }
  }
}

std::string list_experiments() {
  std::string out;
  for (const auto& e : registry()) {
    out += e.name;
    out += "  [";
    out += e.anchor;
    out += "]  ";
    out += e.summary;
    out += '\n';
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  const ExperimentInfo* info = nullptr;
  for (const auto& e : registry())
    if (cfg.experiment == e.name) {
      info = &e;
      break;
    }
  if (!info)
    throw UnknownExperimentError("unknown experiment '" + cfg.experiment + "'");

  std::filesystem::create_directories(cfg.out_dir);
  ExperimentResult result = info->fn(cfg);
  result.experiment = cfg.experiment;

  nlohmann::json summary;
  summary["experiment"] = cfg.experiment;
  summary["anchor"] = info->anchor;
  summary["master_seed"] = cfg.master_seed;
  summary["quick"] = cfg.quick;
  summary["pass"] = result.pass();
  auto& checks = summary["checks"] = nlohmann::json::array();
  for (const auto& c : result.checks) {
    checks.push_back({{"name", c.name},
                      {"pass", c.pass},
                      {"value", c.value},
                      {"threshold", c.threshold},
                      {"detail", c.detail}});
  }
  auto& artifact_names = summary["artifacts"] = nlohmann::json::array();
  for (const auto& a : result.artifacts)
    artifact_names.push_back(std::filesystem::path(a).filename().string());

  const auto summary_path =
      std::filesystem::path(cfg.out_dir) / (cfg.experiment + "_summary.json");
  std::ofstream out(summary_path);
  out << summary.dump(2) << '\n';
  result.artifacts.push_back(summary_path.string());
  return result;
}

int cli_main(int argc, char** argv) {
  CLI::App app{"stochastic maximum-principle verification experiments"};
  ExperimentConfig cfg;
  std::string config_path;
  bool list_only = false;

  app.add_option("--experiment", cfg.experiment, "experiment name");
  app.add_option("--config", config_path, "flat key=value config file");
  app.add_option("--seed", cfg.master_seed, "master seed");
  app.add_option("--out", cfg.out_dir, "output directory");
  app.add_option("--paths", cfg.n_paths, "Monte Carlo sample override");
  app.add_flag("--quick", cfg.quick, "reduced desk scale");
  app.add_flag("--list", list_only, "list registered experiments");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (list_only) {
    std::cout << list_experiments();
    return 0;
  }

  try {
    if (!config_path.empty()) {
      ExperimentConfig file_cfg;
      apply_config_file(file_cfg, config_path);
      // flags given on the command line win over the file
      if (cfg.experiment.empty()) cfg.experiment = file_cfg.experiment;
      if (cfg.master_seed == 1 && file_cfg.master_seed != 1)
        cfg.master_seed = file_cfg.master_seed;
      if (cfg.out_dir == "out" && file_cfg.out_dir != "out")
        cfg.out_dir = file_cfg.out_dir;
      if (cfg.n_paths < 0) cfg.n_paths = file_cfg.n_paths;
      cfg.quick = cfg.quick || file_cfg.quick;
      for (const auto& [k, v] : file_cfg.extra)
        if (!cfg.extra.count(k)) cfg.extra[k] = v;
    }
    if (cfg.experiment.empty())
      throw ConfigError("no experiment requested (use --experiment or --list)");

    const ExperimentResult result = run_experiment(cfg);
    for (const auto& c : result.checks) {
      std::cout << (c.pass ? "PASS " : "FAIL ") << result.experiment << "/"
                << c.name << " value=" << csv::format_double(c.value)
                << " threshold=" << csv::format_double(c.threshold);
      if (!c.detail.empty()) std::cout << " (" << c.detail << ")";
      std::cout << '\n';
    }
    return result.pass() ? 0 : 1;
  } catch (const UnknownExperimentError& e) {
    std::cerr << e.what() << "\nregistered experiments:\n" << list_experiments();
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace spdemax::runner
