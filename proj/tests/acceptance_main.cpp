// Acceptance suite: one criterion per line, exact thresholds pinned in the
// experiment implementations. Exit status 0 only if every criterion passes.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "spdemax/runner.hpp"

int main() {
  using Clock = std::chrono::steady_clock;
  const std::vector<std::pair<std::string, std::string>> criteria = {
      {"reflection_oracle", "Wiener minimum law vs Gaussian tail"},
      {"gamma_bounds", "contraction factor above its closed-form bound"},
      {"ruin_oracle", "strip exit vs gambler's ruin"},
      {"strip_bound_lemma_1_25_1", "hitting bound dominates sampled exits"},
      {"scaling_identity", "dyadic rescaling identity under CRN"},
      {"solver_oracles", "eigenmode decay / steady ramp / mean field"},
      {"energy_identity", "energy residual and ensemble Ito balance"},
      {"max_principle_sweep", "sign preservation across refinements"},
      {"comparison_barrier", "unit barrier and exact linearity"},
      {"envelope_lemma_2_22_1", "envelope domination on the strip"},
      {"decay_exponent_remark_2_23_1", "decay statistic and exponents"},
  };

  std::filesystem::create_directories("acceptance_out");
  bool all_pass = true;
  int index = 0;
  for (const auto& [name, label] : criteria) {
    ++index;
    spdemax::runner::ExperimentConfig cfg;
    cfg.experiment = name;
    cfg.master_seed = 20260809;
    cfg.out_dir = "acceptance_out";

    const auto start = Clock::now();
    bool pass = false;
    std::string detail;
    try {
      const auto result = spdemax::runner::run_experiment(cfg);
      pass = result.pass();
      for (const auto& c : result.checks)
        if (!c.pass)
          detail += " [" + c.name + " value=" + std::to_string(c.value) +
                    " threshold=" + std::to_string(c.threshold) + "]";
    } catch (const std::exception& e) {
      detail = std::string(" [exception: ") + e.what() + "]";
    }
    const double secs =
        std::chrono::duration<double>(Clock::now() - start).count();
    std::printf("[%2d/11] %-34s %-4s (%.1fs) %s%s\n", index, name.c_str(),
                pass ? "PASS" : "FAIL", secs, label.c_str(), detail.c_str());
    std::fflush(stdout);
    all_pass = all_pass && pass;
  }
  std::printf("acceptance: %s\n", all_pass ? "ALL PASS" : "FAILURES");
  return all_pass ? 0 : 1;
}
