#pragma once

#include <optional>
#include <string>

namespace spdemax {

/// Structured pass/fail verdict used by verifiers and scheme guardrails.
/// Invariant: pass == (max_violation <= tolerance).
struct Report {
  std::string check_name;
  bool pass = true;
  double max_violation = 0.0;
  double tolerance = 0.0;
  std::optional<std::pair<double, double>> location;  // (t, x) of worst point
  std::string context;

  /// Line format:
  ///   CHECK <name> verdict=<pass|fail> max_violation=<e> at=(t,x) tol=<e>
  std::string to_line() const;
};

Report make_report(std::string name, double max_violation, double tolerance,
                   std::optional<std::pair<double, double>> location = {},
                   std::string context = {});

}  // namespace spdemax
