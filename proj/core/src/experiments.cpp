#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "spdemax/csv.hpp"
#include "spdemax/fd.hpp"
#include "spdemax/norms.hpp"
#include "spdemax/parallel.hpp"
#include "spdemax/paths.hpp"
#include "spdemax/rng.hpp"
#include "spdemax/runner.hpp"
#include "spdemax/strip.hpp"
#include "spdemax/verify.hpp"

// Experiment implementations. Every experiment derives all of its randomness
// from the config's master seed, writes plot-ready CSV artifacts, and turns
// its acceptance thresholds into CheckResults.

namespace spdemax::runner {

namespace {

namespace fs = std::filesystem;
using paths::McEstimate;
using paths::McParams;
using paths::SamplePath;
using paths::TimeGrid;

constexpr double kInvSqrt2 = 0.7071067811865475244;

std::string artifact_path(const ExperimentConfig& cfg, const std::string& name) {
  return (fs::path(cfg.out_dir) / name).string();
}

CheckResult check_le(std::string name, double value, double threshold,
                     std::string detail = {}) {
  return CheckResult{std::move(name), value <= threshold, value, threshold,
                     std::move(detail)};
}

CheckResult check_ge(std::string name, double value, double threshold,
                     std::string detail = {}) {
  return CheckResult{std::move(name), value >= threshold, value, threshold,
                     std::move(detail)};
}

std::uint64_t subseed(const ExperimentConfig& cfg, std::uint64_t tag) {
  return derive_stream_seed(cfg.master_seed, 0x517A0000ULL + tag);
}

// ---------------------------------------------------------------------------
// 1. Reflection-principle oracle
// ---------------------------------------------------------------------------

McEstimate min_barrier_probability(double level, double horizon,
                                   std::size_t steps, std::size_t n_samples,
                                   std::uint64_t seed) {
  const double step_sd = std::sqrt(horizon / static_cast<double>(steps));
  std::atomic<std::size_t> hits{0};
  parallel_for(n_samples, [&](std::size_t i) {
    NormalStream normals(derive_stream_seed(seed, i));
    double w = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
      w += step_sd * normals.next();
      if (w <= -level) {
        hits.fetch_add(1, std::memory_order_relaxed);
        return;
      }
    }
  });
  McEstimate est;
  est.n_samples = n_samples;
  est.seed = seed;
  const double p = static_cast<double>(hits.load()) /
                   static_cast<double>(n_samples);
  est.value = p;
  est.std_error = std::sqrt(std::max(p * (1.0 - p), 1e-12) /
                            static_cast<double>(n_samples));
  return est;
}

ExperimentResult run_reflection_oracle(const ExperimentConfig& cfg) {
  ExperimentResult result;
  const std::size_t n = cfg.samples(100000, 10000);
  const std::size_t steps = 2048;  // dt = 2^-12 over [0, 1/2]

  csv::Writer out(artifact_path(cfg, "reflection.csv"),
                  {"a", "p_hat", "std_err", "exact"});
  int idx = 0;
  for (double a : {0.5, 1.0}) {
    const auto est =
        min_barrier_probability(a, 0.5, steps, n, subseed(cfg, 10 + idx));
    const double exact = std::erfc(a);  // (2/sqrt(pi)) int_a^inf e^{-x^2} dx
    out.cell(a).cell(est.value).cell(est.std_error).cell(exact);
    out.end_row();
    result.checks.push_back(check_le(
        "min_barrier_a=" + csv::format_double(a),
        std::abs(est.value - exact), 3.0 * est.std_error + 0.01,
        "p_hat=" + csv::format_double(est.value)));
    ++idx;
  }
  result.artifacts.push_back(artifact_path(cfg, "reflection.csv"));
  return result;
}

// ---------------------------------------------------------------------------
// 2. gamma bounds
// ---------------------------------------------------------------------------

ExperimentResult run_gamma_bounds(const ExperimentConfig& cfg) {
  ExperimentResult result;
  const std::size_t n = cfg.samples(100000, 10000);

  csv::Writer out(artifact_path(cfg, "gamma.csv"),
                  {"c", "d", "delta", "gamma_hat", "gamma_lb"});
  int idx = 0;
  for (double c : {1.0, 0.0, 50.0}) {
    McParams mc;
    mc.n_samples = n;
    mc.seed = subseed(cfg, 20 + idx);
    const auto est = strip::estimate_gamma(c, 1.0, 1.0, mc);
    const double lb = strip::gamma_lower_bound(c, 1.0);
    out.cell(c).cell(1.0).cell(1.0).cell(est.value).cell(lb);
    out.end_row();
    const std::string tag = "c=" + csv::format_double(c);
    if (c <= 1.0) {
      result.checks.push_back(check_ge("gamma_lower_bound_" + tag, est.value,
                                       lb - 3.0 * est.std_error,
                                       "se=" + csv::format_double(est.std_error)));
      result.checks.push_back(
          check_ge("gamma_above_invsqrt2_" + tag, est.value, kInvSqrt2));
      result.checks.push_back(check_le("gamma_at_most_one_" + tag, est.value, 1.0));
    } else {
      result.checks.push_back(
          check_ge("gamma_large_c_near_one", est.value, 0.999));
    }
    ++idx;
  }
  result.artifacts.push_back(artifact_path(cfg, "gamma.csv"));
  return result;
}

// ---------------------------------------------------------------------------
// 3. gambler's-ruin oracle for r_m
// ---------------------------------------------------------------------------

SamplePath constant_boundary(double value, double horizon) {
  return SamplePath(TimeGrid(horizon, 1), {value, value});
}

ExperimentResult run_ruin_oracle(const ExperimentConfig& cfg) {
  ExperimentResult result;
  const std::size_t n = cfg.samples(10000, 2000);
  const SamplePath boundary = constant_boundary(0.0, 10.0);
  const double gamma_lb = strip::gamma_lower_bound(1.0, 1.0);

  csv::Writer out(artifact_path(cfg, "ruin.csv"),
                  {"m", "t", "x", "r_hat", "std_err", "bound_rhs"});
  int idx = 0;
  for (double x : {0.3, 0.5}) {
    strip::StripProblem prob;
    prob.boundary = boundary;
    prob.m = 0;
    prob.t = 10.0;
    prob.x = x;
    prob.delta = 1.0;
    McParams mc;
    mc.n_samples = n;
    mc.seed = subseed(cfg, 30 + idx);
    const auto est = strip::estimate_r_m(prob, mc);
    const double bound = strip::bound_r_m(prob, 1.0, 1.0, gamma_lb);
    out.cell(std::int64_t{0}).cell(10.0).cell(x).cell(est.value)
        .cell(est.std_error).cell(bound);
    out.end_row();
    result.checks.push_back(check_le(
        "ruin_x=" + csv::format_double(x), std::abs(est.value - x),
        0.02 + 3.0 * est.std_error, "r_hat=" + csv::format_double(est.value)));
    ++idx;
  }
  result.artifacts.push_back(artifact_path(cfg, "ruin.csv"));
  return result;
}

// ---------------------------------------------------------------------------
// 4. hitting bound over Wiener boundaries
// ---------------------------------------------------------------------------

ExperimentResult run_strip_bound(const ExperimentConfig& cfg) {
  ExperimentResult result;
  const std::size_t n_boundaries = cfg.samples(50, 10);
  const std::size_t reps = cfg.quick ? 600 : 2500;
  const double c = 1.0, d = 1.0, delta = 1.0;

  McParams gamma_mc;
  gamma_mc.n_samples = cfg.quick ? 5000 : 30000;
  gamma_mc.seed = subseed(cfg, 40);
  const auto gamma_est = strip::estimate_gamma(c, d, delta, gamma_mc);

  const TimeGrid bgrid(1.0, 32768);  // resolves dyadic level 12
  csv::Writer out(artifact_path(cfg, "strip_bound.csv"),
                  {"m", "t", "x", "r_hat", "std_err", "bound_rhs"});

  double worst_excess = -1.0;
  std::string worst_at;
  std::uint64_t point_tag = 0;
  for (std::size_t b = 0; b < n_boundaries; ++b) {
    const auto boundary =
        paths::simulate_wiener(bgrid, derive_stream_seed(subseed(cfg, 41), b));
    for (int m : {0, 2, 4}) {
      const double width = std::exp2(-0.5 * m);
      for (double t : {0.5, 1.0}) {
        for (double frac : {0.05, 0.2, 0.45, 0.7}) {
          strip::StripProblem prob;
          prob.boundary = boundary;
          prob.m = m;
          prob.t = t;
          prob.x = frac * width;
          prob.delta = delta;
          McParams mc;
          mc.n_samples = reps;
          mc.seed = derive_stream_seed(subseed(cfg, 42), point_tag++);
          const auto est = strip::estimate_r_m(prob, mc);
          const double bound = strip::bound_r_m(prob, c, d, gamma_est.value);
          out.cell(static_cast<std::int64_t>(m)).cell(t).cell(prob.x)
              .cell(est.value).cell(est.std_error).cell(bound);
          out.end_row();
          const double excess = est.value - bound - 3.0 * est.std_error;
          if (excess > worst_excess) {
            worst_excess = excess;
            worst_at = "boundary=" + std::to_string(b) +
                       " m=" + std::to_string(m) +
                       " t=" + csv::format_double(t) +
                       " x=" + csv::format_double(prob.x);
          }
        }
      }
    }
  }
  result.checks.push_back(
      check_le("hitting_bound_worst_excess", worst_excess, 0.0, worst_at));
  result.checks.push_back(check_ge("gamma_hat_sane", gamma_est.value, kInvSqrt2));
  result.artifacts.push_back(artifact_path(cfg, "strip_bound.csv"));
  return result;
}

// ---------------------------------------------------------------------------
// 5. scaling identity under common random numbers
// ---------------------------------------------------------------------------

ExperimentResult run_scaling_identity(const ExperimentConfig& cfg) {
  ExperimentResult result;
  const std::size_t reps = cfg.samples(20000, 4000);
  const TimeGrid bgrid(1.0, 4096);
  const auto boundary = paths::simulate_wiener(bgrid, subseed(cfg, 50));

  csv::Writer out(artifact_path(cfg, "scaling.csv"),
                  {"m", "r_m", "r0_rescaled", "diff", "combined_se"});
  for (int m : {1, 2, 3}) {
    const double width = std::exp2(-0.5 * m);
    strip::StripProblem prob;
    prob.boundary = boundary;
    prob.m = m;
    prob.t = 1.0;
    prob.x = 0.4 * width;
    prob.delta = 1.0;
    McParams mc;
    mc.n_samples = reps;
    mc.seed = subseed(cfg, 51 + static_cast<std::uint64_t>(m));

    const auto direct = strip::estimate_r_m(prob, mc);

    strip::StripProblem rescaled;
    rescaled.boundary = strip::rescale_boundary(boundary, m);
    rescaled.m = 0;
    rescaled.t = std::exp2(m) * prob.t;
    rescaled.x = std::exp2(0.5 * m) * prob.x;
    rescaled.delta = 1.0;
    const auto recov = strip::estimate_r_m(rescaled, mc);

    const double diff = std::abs(direct.value - recov.value);
    const double se = std::sqrt(direct.std_error * direct.std_error +
                                recov.std_error * recov.std_error);
    out.cell(static_cast<std::int64_t>(m)).cell(direct.value)
        .cell(recov.value).cell(diff).cell(se);
    out.end_row();
    result.checks.push_back(check_le("scaling_m=" + std::to_string(m), diff,
                                     3.0 * std::max(se, 1e-12)));
  }
  result.artifacts.push_back(artifact_path(cfg, "scaling.csv"));
  return result;
}

// ---------------------------------------------------------------------------
// solver-side helpers
// ---------------------------------------------------------------------------

double exact_heat_mode(double a, double t, double x) {
  const double pi = 3.14159265358979323846;
  return std::exp(-a * pi * pi * t / 2.0) * std::sin(pi * x);
}

fd::SpdeProblem heat_problem(double a_val, double sigma_val, double x_lo,
                             double x_hi) {
  fd::SpdeProblem prob;
  prob.x_lo = x_lo;
  prob.x_hi = x_hi;
  prob.a = [a_val](double) { return a_val; };
  prob.sigma = [sigma_val](double) { return sigma_val; };
  prob.delta0 = 0.25;
  prob.delta1 = 0.5;
  return prob;
}

// ---------------------------------------------------------------------------
// 6. solver oracles
// ---------------------------------------------------------------------------

ExperimentResult run_solver_oracles(const ExperimentConfig& cfg) {
  ExperimentResult result;
  const double pi = 3.14159265358979323846;

  {  // eigenfunction decay, dx = 2^-8, t = 0.1
    auto prob = heat_problem(1.0, 0.0, 0.0, 1.0);
    prob.ic = [pi](double x) { return std::sin(pi * x); };
    fd::SolveGrids grids;
    grids.space = fd::SpaceGrid(0.0, 1.0, 256);
    grids.time = TimeGrid(0.1, 13120);
    grids.store_every = 64;
    const auto driver = paths::simulate_wiener(grids.time, subseed(cfg, 60));
    const auto sol = fd::solve_spde(prob, grids, driver);

    const std::size_t last = sol.rows() - 1;
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < sol.cols(); ++j) {
      const double ex = exact_heat_mode(1.0, 0.1, sol.space.x_at(j));
      const double diff = sol.at(last, j) - ex;
      num += diff * diff;
      den += ex * ex;
    }
    const double rel_l2 = std::sqrt(num / den);
    result.checks.push_back(check_le("eigenmode_rel_l2", rel_l2, 0.02));
    const double mid = sol.at(last, sol.cols() / 2);
    const double mid_exact = exact_heat_mode(1.0, 0.1, 0.5);
    result.checks.push_back(check_le("eigenmode_midpoint_rel",
                                     std::abs(mid - mid_exact) / mid_exact,
                                     0.02,
                                     "u=" + csv::format_double(mid)));
    fd::write_field_csv(sol, artifact_path(cfg, "solver_eigen.csv"));
    fd::write_field_binary(sol, artifact_path(cfg, "solver_eigen.bin"));
    result.artifacts.push_back(artifact_path(cfg, "solver_eigen.csv"));
    result.artifacts.push_back(artifact_path(cfg, "solver_eigen.bin"));
  }

  {  // exit-problem steady profile at t = 2
    auto prob = heat_problem(1.0, 0.0, 0.0, 1.0);
    prob.bc_hi = [](double) { return 1.0; };
    fd::SolveGrids grids;
    grids.space = fd::SpaceGrid(0.0, 1.0, 256);
    grids.time = TimeGrid(2.0, 262144);
    grids.store_every = 4096;
    const auto driver = paths::simulate_wiener(grids.time, subseed(cfg, 61));
    const auto sol = fd::solve_spde(prob, grids, driver);
    const std::size_t last = sol.rows() - 1;
    double worst = 0.0;
    for (std::size_t j = 0; j < sol.cols(); ++j)
      worst = std::max(worst, std::abs(sol.at(last, j) - sol.space.x_at(j)));
    result.checks.push_back(check_le("steady_ramp_dev", worst, 0.01));
  }

  {  // Monte Carlo mean field with transport noise
    auto prob = heat_problem(1.0, 0.5, 0.0, 1.0);
    prob.ic = [pi](double x) { return std::sin(pi * x); };
    fd::SolveGrids grids;
    grids.space = fd::SpaceGrid(0.0, 1.0, 64);
    grids.time = TimeGrid(0.1, 832);
    grids.store_every = 416;
    const std::size_t n_seeds = cfg.samples(1000, 100);
    const std::size_t cols = grids.space.points();

    std::vector<double> final_rows(n_seeds * cols);
    parallel_for(n_seeds, [&](std::size_t i) {
      const auto driver = paths::simulate_wiener(
          grids.time, derive_stream_seed(subseed(cfg, 62), i));
      const auto sol = fd::solve_spde(prob, grids, driver);
      for (std::size_t j = 0; j < cols; ++j)
        final_rows[i * cols + j] = sol.at(sol.rows() - 1, j);
    });

    double num = 0.0, den = 0.0, se_sq = 0.0;
    const double dx = grids.space.dx();
    for (std::size_t j = 0; j < cols; ++j) {
      double mean = 0.0;
      for (std::size_t i = 0; i < n_seeds; ++i) mean += final_rows[i * cols + j];
      mean /= static_cast<double>(n_seeds);
      double var = 0.0;
      for (std::size_t i = 0; i < n_seeds; ++i) {
        const double d = final_rows[i * cols + j] - mean;
        var += d * d;
      }
      var = n_seeds > 1 ? var / static_cast<double>(n_seeds - 1) : 0.0;
      const double ex = exact_heat_mode(1.0, 0.1, grids.space.x_at(j));
      num += (mean - ex) * (mean - ex) * dx;
      den += ex * ex * dx;
      se_sq += var / static_cast<double>(n_seeds) * dx;
    }
    const double err = std::sqrt(num);
    const double tol = 3.0 * std::sqrt(se_sq) + 0.02 * std::sqrt(den);
    result.checks.push_back(check_le("mean_field_l2", err, tol));
  }
  return result;
}

// ---------------------------------------------------------------------------
// 7. energy identity
// ---------------------------------------------------------------------------

ExperimentResult run_energy_identity(const ExperimentConfig& cfg) {
  ExperimentResult result;
  const double pi = 3.14159265358979323846;

  {  // deterministic residual
    auto prob = heat_problem(1.0, 0.0, 0.0, 1.0);
    prob.ic = [pi](double x) { return std::sin(pi * x); };
    prob.f = [pi](double, double x) { return 0.3 * std::sin(pi * x); };
    fd::SolveGrids grids;
    grids.space = fd::SpaceGrid(0.0, 1.0, 256);
    grids.time = TimeGrid(0.05, 6560);
    const auto driver = paths::simulate_wiener(grids.time, subseed(cfg, 70));
    const auto sol = fd::solve_spde(prob, grids, driver);
    const auto residual = fd::energy_residual(sol, prob);
    double worst = 0.0;
    for (double r : residual) worst = std::max(worst, std::abs(r));
    const double rel = worst / fd::row_pos_l2_sq(sol, 0);
    result.checks.push_back(check_le("deterministic_residual_rel", rel, 0.01));
  }

  {  // ensemble Ito balance. The discrete identity per step is
     //   ||u^{n+1}||^2 - ||u^n||^2 =
     //     -a dt ||D m||^2 + ||B eta||^2 + martingale,
     // with m the drift-only midpoint and B eta the smoothed transport kick
     // B (sigma dw D_c u). Assembling both functionals with the scheme's own
     // operators leaves exactly the martingale as the residual, so the
     // ensemble mean must match ||u_0||^2 within pure Monte Carlo error.
    auto prob = heat_problem(1.0, 0.5, 0.0, 1.0);
    prob.ic = [pi](double x) { return std::sin(pi * x); };
    fd::SolveGrids grids;
    grids.space = fd::SpaceGrid(0.0, 1.0, 128);
    grids.time = TimeGrid(0.1, 3328);
    const std::size_t n_seeds = cfg.samples(1000, 200);
    const double a_val = 1.0, sigma_val = 0.5;

    std::vector<double> z(n_seeds), x_term(n_seeds), y_term(n_seeds);
    std::vector<double> cont_cell(n_seeds), cont_cent(n_seeds);
    std::atomic<double> u0_sq{0.0};
    parallel_for(n_seeds, [&](std::size_t i) {
      const auto driver = paths::simulate_wiener(
          grids.time, derive_stream_seed(subseed(cfg, 71), i));
      const auto sol = fd::solve_spde(prob, grids, driver);
      const double uT = fd::row_l2_sq(sol, sol.rows() - 1);
      const double dt = sol.stored_time.dt();
      const double dx = sol.space.dx();
      const std::size_t cols = sol.cols();
      const double lambda = 0.25 * dt * a_val / (dx * dx);

      // (I - lambda D^2)^{-1} on interior nodes, the scheme's smoother
      std::vector<double> rhs(cols - 2), scratch(cols - 2);
      auto smooth = [&](std::vector<double>& w) {
        const double diag = 1.0 + 2.0 * lambda, off = -lambda;
        double beta = diag;
        w[0] /= beta;
        for (std::size_t q = 1; q < w.size(); ++q) {
          scratch[q] = off / beta;
          beta = diag - off * scratch[q];
          w[q] = (w[q] - off * w[q - 1]) / beta;
        }
        for (std::size_t q = w.size() - 1; q-- > 0;)
          w[q] -= scratch[q + 1] * w[q + 1];
      };

      double drift_diss = 0.0, noise_inj = 0.0, cont_diss = 0.0;
      std::vector<double> mid(cols, 0.0);
      for (std::size_t r = 0; r + 1 < sol.rows(); ++r) {
        const double dw = sol.noise[r];
        // smoothed transport kick direction v = B D_c u^n
        for (std::size_t j = 1; j + 1 < cols; ++j)
          rhs[j - 1] = (sol.at(r, j + 1) - sol.at(r, j - 1)) * 0.5 / dx;
        smooth(rhs);
        double v_sq = 0.0;
        for (double vq : rhs) v_sq += vq * vq;
        v_sq *= dx;
        noise_inj += sigma_val * sigma_val * dw * dw * v_sq;

        // drift-only midpoint (u^n + u^{n+1} - B eta) / 2
        mid[0] = 0.5 * (sol.at(r, 0) + sol.at(r + 1, 0));
        mid[cols - 1] = 0.5 * (sol.at(r, cols - 1) + sol.at(r + 1, cols - 1));
        for (std::size_t j = 1; j + 1 < cols; ++j)
          mid[j] = 0.5 * (sol.at(r, j) + sol.at(r + 1, j) -
                          sigma_val * dw * rhs[j - 1]);
        double mid_grad = 0.0;
        for (std::size_t j = 0; j + 1 < cols; ++j) {
          const double d = (mid[j + 1] - mid[j]) / dx;
          mid_grad += d * d;
        }
        drift_diss += dt * a_val * mid_grad * dx;
        cont_diss += 0.5 * dt * (fd::row_grad_sq(sol, r) +
                                 fd::row_grad_sq(sol, r + 1));
      }
      // continuum-form gradient integrals go to the CSV only; they carry
      // the smoother's O(dt/dx^2) offset and are reported, not asserted
      double cont_centered = 0.0;
      for (std::size_t r = 0; r + 1 < sol.rows(); ++r)
        cont_centered += dt * fd::row_centered_grad_sq(sol, r);

      z[i] = uT + drift_diss - noise_inj;
      x_term[i] = uT;
      y_term[i] = drift_diss - noise_inj;
      cont_cell[i] = cont_diss;
      cont_cent[i] = cont_centered;
      if (i == 0) u0_sq.store(fd::row_l2_sq(sol, 0));
    });

    double mean = 0.0;
    for (double v : z) mean += v;
    mean /= static_cast<double>(n_seeds);
    double var = 0.0;
    for (double v : z) var += (v - mean) * (v - mean);
    var = var / static_cast<double>(n_seeds - 1);
    const double se = std::sqrt(var / static_cast<double>(n_seeds));
    result.checks.push_back(check_le("ito_balance",
                                     std::abs(mean - u0_sq.load()),
                                     3.0 * se,
                                     "mean=" + csv::format_double(mean)));

    csv::Writer out(artifact_path(cfg, "energy.csv"),
                    {"seed_index", "uT_sq", "net_dissipation",
                     "grad_sq_cell_integral", "grad_sq_centered_integral"});
    for (std::size_t i = 0; i < n_seeds; ++i) {
      out.cell(i).cell(x_term[i]).cell(y_term[i]).cell(cont_cell[i])
          .cell(cont_cent[i]);
      out.end_row();
    }
    result.artifacts.push_back(artifact_path(cfg, "energy.csv"));
  }
  return result;
}

// ---------------------------------------------------------------------------
// 8/9 shared: nonpositivity sweep ladder
// ---------------------------------------------------------------------------

// Per-step running max of the positive part, via the solver's row observer.
struct LadderLevel {
  std::size_t cells;
  std::size_t steps;
  std::size_t seeds;
};

double sweep_max_positive(const fd::SpdeProblem& prob, double horizon,
                          const LadderLevel& level, std::uint64_t seed_base,
                          double offset) {
  // offset: violations are measured on u - offset (offset = 1 for the
  // u <= 1 barrier, 0 for plain sign preservation).
  std::vector<double> per_seed(level.seeds, 0.0);
  parallel_for(level.seeds, [&](std::size_t i) {
    fd::SolveGrids grids;
    grids.space = fd::SpaceGrid(prob.x_lo, prob.x_hi, level.cells);
    grids.time = TimeGrid(horizon, level.steps);
    grids.store_every = level.steps;  // observer carries the per-step max
    const auto driver = paths::simulate_wiener(
        grids.time, derive_stream_seed(seed_base, i));
    double worst = 0.0;
    fd::solve_spde_observed(prob, grids, driver,
                            [&](std::size_t, const std::vector<double>& row) {
                              for (double v : row)
                                worst = std::max(worst, v - offset);
                            });
    per_seed[i] = worst;
  });
  return *std::max_element(per_seed.begin(), per_seed.end());
}

// Narrow nonpositive forcing centered at 1/2. The small total mass keeps the
// solution's boundary slope moderate while max|f| still sets the violation
// scale max|ic| + T max|f|.
fd::FieldFn centered_sink(double strength, double half_width = 0.015) {
  return [strength, half_width](double, double x) {
    const double y = (x - 0.5) / half_width;
    if (y <= -1.0 || y >= 1.0) return 0.0;
    const double b = 1.0 - y * y;
    return -strength * b * b;
  };
}

// ---------------------------------------------------------------------------
// 8. maximum principle sweep
// ---------------------------------------------------------------------------

ExperimentResult run_max_principle_sweep(const ExperimentConfig& cfg) {
  ExperimentResult result;
  const double pi = 3.14159265358979323846;
  const double horizon = 0.12;
  const double f_strength = 400.0;

  auto prob = heat_problem(1.0, 0.5, 0.0, 1.0);
  prob.ic = [pi](double x) { return -std::sin(pi * x); };
  prob.f = centered_sink(f_strength);
  const double scale = 1.0 + horizon * f_strength;

  // dt sits at the CFL limit, so boundary crossing events are dense and the
  // max statistic concentrates; seed counts scale inversely with the step
  // count, keeping the draws per level equal and the refinement ratio pinned
  // to the dx ratio.
  const std::vector<LadderLevel> ladder = {
      {256, 15744, cfg.quick ? 20u : 100u},
      {512, 62976, cfg.quick ? 5u : 25u},
      {1024, 251904, cfg.quick ? 2u : 6u},
  };

  // Reference level exercises the verifier on fully stored fields.
  double ref_max = 0.0;
  {
    const std::size_t seeds = ladder[0].seeds;
    std::vector<double> per_seed(seeds, 0.0);
    parallel_for(seeds, [&](std::size_t i) {
      fd::SolveGrids grids;
      grids.space = fd::SpaceGrid(0.0, 1.0, ladder[0].cells);
      grids.time = TimeGrid(horizon, ladder[0].steps);
      const auto driver = paths::simulate_wiener(
          grids.time, derive_stream_seed(subseed(cfg, 80), i));
      const auto sol = fd::solve_spde(prob, grids, driver);
      const Report rep = verify::verify_sign(sol, prob, 1e-3);
      per_seed[i] = rep.max_violation;
    });
    ref_max = *std::max_element(per_seed.begin(), per_seed.end());

    // one representative report in the line-oriented format
    fd::SolveGrids grids;
    grids.space = fd::SpaceGrid(0.0, 1.0, ladder[0].cells);
    grids.time = TimeGrid(horizon, ladder[0].steps);
    const auto driver = paths::simulate_wiener(grids.time,
                                               derive_stream_seed(subseed(cfg, 80), 0));
    const auto sol = fd::solve_spde(prob, grids, driver);
    std::ofstream lines(artifact_path(cfg, "maxprin_checks.txt"));
    lines << verify::verify_sign(sol, prob, 1e-3).to_line() << '\n';
    result.artifacts.push_back(artifact_path(cfg, "maxprin_checks.txt"));
  }
  result.checks.push_back(
      check_le("sign_reference_rel", ref_max / scale, 1e-3));

  // Refinement trend dt -> dt/4, dx -> dx/2 (seed counts scaled so the
  // rare-event count per level stays comparable).
  std::vector<double> level_max(3, 0.0);
  level_max[0] = ref_max / scale;
  for (std::size_t l = 1; l < ladder.size(); ++l)
    level_max[l] = sweep_max_positive(prob, horizon, ladder[l],
                                      subseed(cfg, 80 + l), 0.0) /
                   scale;

  csv::Writer out(artifact_path(cfg, "maxprin_sweep.csv"),
                  {"level", "cells", "steps", "seeds", "max_violation_rel"});
  for (std::size_t l = 0; l < ladder.size(); ++l) {
    out.cell(l).cell(ladder[l].cells).cell(ladder[l].steps)
        .cell(ladder[l].seeds).cell(level_max[l]);
    out.end_row();
  }
  result.artifacts.push_back(artifact_path(cfg, "maxprin_sweep.csv"));

  const bool monotone =
      level_max[0] > level_max[1] && level_max[1] > level_max[2];
  result.checks.push_back(CheckResult{
      "sign_refinement_strictly_decreasing", monotone,
      level_max[1] > 0 ? level_max[2] / level_max[1] : 0.0, 1.0,
      csv::format_double(level_max[0]) + " > " +
          csv::format_double(level_max[1]) + " > " +
          csv::format_double(level_max[2])});

  {  // sigma = 0: exactly zero violations
    auto det = prob;
    det.sigma = [](double) { return 0.0; };
    const double v = sweep_max_positive(
        det, horizon, {256, 15744, 3}, subseed(cfg, 89), 0.0);
    result.checks.push_back(check_le("sign_deterministic_exact", v, 0.0));
  }
  return result;
}

// ---------------------------------------------------------------------------
// 9. comparison / barrier
// ---------------------------------------------------------------------------

ExperimentResult run_comparison_barrier(const ExperimentConfig& cfg) {
  ExperimentResult result;
  const double pi = 3.14159265358979323846;
  const double horizon = 0.12;
  const double f_strength = 400.0;

  // u stays below the constant barrier 1: ic <= 1, bc = 1, f <= 0.
  auto prob = heat_problem(1.0, 0.5, 0.0, 1.0);
  prob.ic = [pi](double x) { return 1.0 - std::sin(pi * x); };
  prob.bc_lo = [](double) { return 1.0; };
  prob.bc_hi = [](double) { return 1.0; };
  prob.f = centered_sink(f_strength);
  const double scale = 1.0 + horizon * f_strength;

  auto prob_bar = heat_problem(1.0, 0.5, 0.0, 1.0);
  prob_bar.ic = [](double) { return 1.0; };
  prob_bar.bc_lo = [](double) { return 1.0; };
  prob_bar.bc_hi = [](double) { return 1.0; };

  const std::vector<LadderLevel> ladder = {
      {256, 15744, cfg.quick ? 20u : 100u},
      {512, 62976, cfg.quick ? 5u : 25u},
      {1024, 251904, cfg.quick ? 2u : 6u},
  };

  // Reference level through the comparison verifier against ubar == 1.
  double ref_max = 0.0;
  {
    const std::size_t seeds = ladder[0].seeds;
    std::vector<double> per_seed(seeds, 0.0);
    parallel_for(seeds, [&](std::size_t i) {
      fd::SolveGrids grids;
      grids.space = fd::SpaceGrid(0.0, 1.0, ladder[0].cells);
      grids.time = TimeGrid(horizon, ladder[0].steps);
      const auto driver = paths::simulate_wiener(
          grids.time, derive_stream_seed(subseed(cfg, 90), i));
      const auto sol = fd::solve_spde(prob, grids, driver);
      const auto barrier = fd::constant_solution(1.0, sol);
      const std::vector<double> rho(sol.rows(), 1.0);
      const Report rep =
          verify::verify_comparison(sol, prob, barrier, prob_bar, rho, 1e-3);
      per_seed[i] = rep.max_violation;
    });
    ref_max = *std::max_element(per_seed.begin(), per_seed.end());
  }
  result.checks.push_back(
      check_le("barrier_reference_rel", ref_max / scale, 1e-3));

  std::vector<double> level_max(3, 0.0);
  level_max[0] = sweep_max_positive(prob, horizon, ladder[0],
                                    subseed(cfg, 90), 1.0) /
                 scale;
  for (std::size_t l = 1; l < ladder.size(); ++l)
    level_max[l] = sweep_max_positive(prob, horizon, ladder[l],
                                      subseed(cfg, 90 + l), 1.0) /
                   scale;

  csv::Writer out(artifact_path(cfg, "barrier_sweep.csv"),
                  {"level", "cells", "steps", "seeds", "max_violation_rel"});
  for (std::size_t l = 0; l < ladder.size(); ++l) {
    out.cell(l).cell(ladder[l].cells).cell(ladder[l].steps)
        .cell(ladder[l].seeds).cell(level_max[l]);
    out.end_row();
  }
  result.artifacts.push_back(artifact_path(cfg, "barrier_sweep.csv"));

  const bool monotone =
      level_max[0] > level_max[1] && level_max[1] > level_max[2];
  result.checks.push_back(CheckResult{
      "barrier_refinement_strictly_decreasing", monotone,
      level_max[1] > 0 ? level_max[2] / level_max[1] : 0.0, 1.0,
      csv::format_double(level_max[0]) + " > " +
          csv::format_double(level_max[1]) + " > " +
          csv::format_double(level_max[2])});

  {  // exact linearity: u and 2u compared with rho == 2 under shared noise
    fd::SolveGrids grids;
    grids.space = fd::SpaceGrid(0.0, 1.0, 256);
    grids.time = TimeGrid(horizon, 15744);
    grids.store_every = 96;
    const auto driver = paths::simulate_wiener(grids.time, subseed(cfg, 95));

    auto doubled = prob;
    doubled.ic = [&prob](double x) { return 2.0 * prob.ic_at(x); };
    doubled.bc_lo = [](double) { return 2.0; };
    doubled.bc_hi = [](double) { return 2.0; };
    doubled.f = [&prob](double t, double x) { return 2.0 * prob.f_at(t, x); };

    const auto u1 = fd::solve_spde(prob, grids, driver);
    const auto u2 = fd::solve_spde(doubled, grids, driver);
    double worst = 0.0, ref = 0.0;
    for (std::size_t k = 0; k < u1.values.size(); ++k) {
      worst = std::max(worst, std::abs(u2.values[k] - 2.0 * u1.values[k]));
      ref = std::max(ref, std::abs(u2.values[k]));
    }
    result.checks.push_back(
        check_le("linearity_rel", worst / std::max(ref, 1e-300), 1e-12));

    const std::vector<double> rho(u1.rows(), 2.0);
    const Report rep =
        verify::verify_comparison(u2, doubled, u1, prob, rho, 0.0);
    result.checks.push_back(CheckResult{"linearity_verifier", rep.pass,
                                        rep.max_violation, rep.tolerance,
                                        rep.to_line()});
  }

  {  // sigma = 0 comparison is exact
    auto det = prob;
    det.sigma = [](double) { return 0.0; };
    const double v = sweep_max_positive(det, horizon, {256, 15744, 2},
                                        subseed(cfg, 96), 1.0);
    result.checks.push_back(check_le("barrier_deterministic_exact", v, 0.0));
  }
  return result;
}

// ---------------------------------------------------------------------------
// 10. envelope
// ---------------------------------------------------------------------------

ExperimentResult run_envelope(const ExperimentConfig& cfg) {
  ExperimentResult result;
  const int m = 2;  // strip width 1/2
  const double width = 0.5;
  const double horizon = 0.125;
  const double tol = 1e-2;

  auto prob_u = heat_problem(1.0, 0.5, 0.0, 2.0);
  prob_u.f = [width](double, double x) {
    if (x <= width || x >= 1.0) return 0.0;
    const double s = (x - width) * (1.0 - x) / 0.0625;  // peak 1 at x = 0.75
    return 40.0 * s * s;
  };

  auto prob_v = heat_problem(1.0, 0.5, 0.0, width);
  prob_v.bc_hi = [](double) { return 1.0; };

  fd::SolveGrids grids_u;
  grids_u.space = fd::SpaceGrid(0.0, 2.0, 512);
  grids_u.time = TimeGrid(horizon, 16384);
  grids_u.store_every = 16;
  fd::SolveGrids grids_v = grids_u;
  grids_v.space = fd::SpaceGrid(0.0, width, 128);

  const std::size_t seeds = cfg.samples(50, 10);
  std::vector<double> fractions(seeds), sups(seeds), excesses(seeds);
  parallel_for(seeds, [&](std::size_t i) {
    const auto driver = paths::simulate_wiener(
        grids_u.time, derive_stream_seed(subseed(cfg, 100), i));
    const auto u = fd::solve_spde(prob_u, grids_u, driver);
    const auto v = fd::solve_spde(prob_v, grids_v, driver);
    const auto res = verify::verify_envelope(u, prob_u, v, m, tol);
    fractions[i] = res.pass_fraction;
    sups[i] = res.sup_edge;
    excesses[i] = res.report.max_violation;
  });

  double frac = 0.0;
  for (double f : fractions) frac += f;
  frac /= static_cast<double>(seeds);
  result.checks.push_back(check_ge("envelope_pass_fraction", frac, 0.99));

  {  // sigma = 0: inequality holds everywhere
    auto det_u = prob_u;
    det_u.sigma = [](double) { return 0.0; };
    auto det_v = prob_v;
    det_v.sigma = [](double) { return 0.0; };
    const auto driver = paths::simulate_wiener(grids_u.time, subseed(cfg, 101));
    const auto u = fd::solve_spde(det_u, grids_u, driver);
    const auto v = fd::solve_spde(det_v, grids_v, driver);
    const auto res = verify::verify_envelope(u, det_u, v, m, 1e-9);
    result.checks.push_back(
        check_ge("envelope_deterministic_fraction", res.pass_fraction, 1.0));
  }

  csv::Writer out(artifact_path(cfg, "envelope.csv"),
                  {"seed_index", "pass_fraction", "sup_edge", "max_excess"});
  for (std::size_t i = 0; i < seeds; ++i) {
    out.cell(i).cell(fractions[i]).cell(sups[i]).cell(excesses[i]);
    out.end_row();
  }
  result.artifacts.push_back(artifact_path(cfg, "envelope.csv"));
  return result;
}

// ---------------------------------------------------------------------------
// 11. decay machinery
// ---------------------------------------------------------------------------

ExperimentResult run_decay_machinery(const ExperimentConfig& cfg) {
  ExperimentResult result;
  const double a_val = 1.0, sigma_val = 0.5;
  const double delta_ratio = (a_val - sigma_val * sigma_val) /
                             (sigma_val * sigma_val);  // a - s^2 >= delta s^2
  const double c = 1.0;

  // alpha0 at the time-changed oscillation budget c sqrt(delta)
  paths::Alpha0Params ap;
  ap.c = c * std::sqrt(delta_ratio);
  ap.horizon = 1.0;
  ap.n_max = 10;
  ap.mc.n_samples = cfg.samples(200, 50);
  ap.mc.seed = subseed(cfg, 110);
  const auto alpha0 = paths::estimate_alpha0(ap);
  const double alpha = std::clamp(alpha0.value, 1e-3, 0.99);

  McParams gamma_mc;
  gamma_mc.n_samples = cfg.quick ? 5000 : 30000;
  gamma_mc.seed = subseed(cfg, 111);
  const auto gamma_est = strip::estimate_gamma(c, 1.0, 1.0, gamma_mc);

  const auto ec =
      norms::exponent_constants(4.0, alpha, c, 0.5, gamma_est.value);
  {  // algebraic identity between the two mu-bound expressions
    const double direct =
        ec.p * (1.0 + 2.0 * std::log2(ec.gamma_value)) - 2.0;
    result.checks.push_back(check_le("exponent_identity",
                                     std::abs(direct - ec.mu_sup), 1e-12));
  }

  strip::DecayParams dp;
  dp.p = 4.0;
  dp.chi = ec.chi;
  dp.alpha = alpha;
  dp.nu = (1.0 + 0.5 * dp.p * dp.chi) / dp.p;
  dp.c = c;
  dp.d = 1.0;
  dp.delta = 1.0;
  dp.validate();

  const TimeGrid dgrid(1.0, 4096);
  const auto driver = paths::simulate_wiener(dgrid, subseed(cfg, 112));
  const auto a_fn = [a_val](double) { return a_val; };
  const auto s_fn = [sigma_val](double) { return sigma_val; };
  const double t_eval = 0.6;
  const std::size_t reps = cfg.quick ? 200 : 800;

  csv::Writer rcsv(artifact_path(cfg, "decay_r.csv"),
                   {"m", "t", "x", "r_hat", "std_err"});
  csv::Writer scsv(artifact_path(cfg, "decay_stat.csv"), {"m", "statistic"});
  std::vector<double> stats;
  std::uint64_t tag = 0;
  for (int m = 0; m <= 8; ++m) {
    const auto xs = strip::log_x_grid(m, 16);
    std::vector<double> rhats(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      McParams mc;
      mc.n_samples = reps;
      mc.seed = derive_stream_seed(subseed(cfg, 113), tag++);
      const auto est = strip::v_m_representation(a_fn, s_fn, driver, m, t_eval,
                                                 xs[i], mc);
      rhats[i] = est.value;
      rcsv.cell(static_cast<std::int64_t>(m)).cell(t_eval).cell(xs[i])
          .cell(est.value).cell(est.std_error);
      rcsv.end_row();
    }
    const double stat = strip::decay_statistic(xs, rhats, dp, m, alpha);
    stats.push_back(stat);
    scsv.cell(static_cast<std::int64_t>(m)).cell(stat);
    scsv.end_row();
  }
  result.artifacts.push_back(artifact_path(cfg, "decay_r.csv"));
  result.artifacts.push_back(artifact_path(cfg, "decay_stat.csv"));

  {  // boundedness across m: no geometric growth
    std::vector<double> sorted = stats;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[sorted.size() / 2];
    const double worst = *std::max_element(stats.begin(), stats.end());
    bool finite = true;
    for (double s : stats) finite = finite && std::isfinite(s);
    result.checks.push_back(CheckResult{"decay_statistic_finite", finite,
                                        worst, 0.0, ""});
    result.checks.push_back(check_le("decay_statistic_bounded", worst,
                                     5.0 * median + 1e-9,
                                     "median=" + csv::format_double(median)));
  }

  {  // fitted boundary exponent of v_m vs 0.8 chi
    const int m_fit = 2;
    const double width = std::exp2(-0.5 * m_fit);
    std::vector<double> xs, rh;
    for (int i = 0; i < 12; ++i) {
      const double f = 0.05 * std::pow(10.0, static_cast<double>(i) / 11.0);
      xs.push_back(f * width);  // 0.05 w .. 0.5 w log-spaced
    }
    for (std::size_t i = 0; i < xs.size(); ++i) {
      McParams mc;
      mc.n_samples = cfg.quick ? 1000 : 4000;
      mc.seed = derive_stream_seed(subseed(cfg, 114), i);
      rh.push_back(strip::v_m_representation(a_fn, s_fn, driver, m_fit, t_eval,
                                             xs[i], mc)
                       .value);
    }
    const double slope = norms::fit_power_law(xs, rh);
    result.checks.push_back(check_ge("decay_exponent_vs_chi", slope,
                                     0.8 * ec.chi,
                                     "chi=" + csv::format_double(ec.chi)));
    csv::Writer ecsv(artifact_path(cfg, "exponent.csv"),
                     {"t", "x_min", "x_max", "fitted_exponent"});
    ecsv.cell(t_eval).cell(xs.front()).cell(xs.back()).cell(slope);
    ecsv.end_row();
    result.artifacts.push_back(artifact_path(cfg, "exponent.csv"));
  }

  {  // weighted-norm closed form T/(theta+p)
    fd::FieldSolution field;
    field.space = fd::SpaceGrid(0.0, 1.0, 512);
    field.stored_time = TimeGrid(1.0, 8);
    field.values.assign(field.rows() * field.cols(), 0.0);
    field.noise.assign(field.rows() - 1, 0.0);
    for (std::size_t r = 0; r < field.rows(); ++r)
      for (std::size_t j = 0; j < field.cols(); ++j)
        field.at(r, j) = field.space.x_at(j);
    norms::NormParams np{4.0, 2.0, 0, 1.0};
    const double norm = norms::weighted_norm({field}, np);
    const double expected = 1.0 / (np.theta + np.p);
    result.checks.push_back(check_le("weighted_norm_closed_form",
                                     std::abs(std::pow(norm, np.p) - expected),
                                     1e-3));
    csv::Writer ncsv(artifact_path(cfg, "norm_values.csv"),
                     {"quantity", "p", "theta", "order", "tau", "value"});
    ncsv.cell(std::string("ramp_norm_p")).cell(np.p).cell(np.theta)
        .cell(std::int64_t{0}).cell(np.tau).cell(std::pow(norm, np.p));
    ncsv.end_row();
    result.artifacts.push_back(artifact_path(cfg, "norm_values.csv"));
  }

  {  // tau_n unit cases are exact
    const std::vector<double> zero(11, 0.0), one(11, 1.0);
    const double t1 = norms::tau_n(zero, 3, 10.0);
    const double t2 = norms::tau_n(one, 3, 10.0);
    const std::vector<double> one5(5, 1.0);
    const double t3 = norms::tau_n(one5, 5, 2.0);
    const bool exact = t1 == 10.0 && t2 == 3.0 && t3 == 2.0;
    result.checks.push_back(CheckResult{
        "tau_n_unit_cases", exact, t2, 3.0,
        csv::format_double(t1) + "," + csv::format_double(t2) + "," +
            csv::format_double(t3)});
    csv::Writer tcsv(artifact_path(cfg, "tau_n.csv"), {"n", "tau_n"});
    tcsv.cell(std::int64_t{3}).cell(t2);
    tcsv.end_row();
    tcsv.cell(std::int64_t{5}).cell(t3);
    tcsv.end_row();
    result.artifacts.push_back(artifact_path(cfg, "tau_n.csv"));
  }

  result.checks.push_back(check_ge("alpha0_positive", alpha0.value, 1e-3));
  return result;
}

// ---------------------------------------------------------------------------
// 12. alpha0 estimate + path statistics CSV
// ---------------------------------------------------------------------------

ExperimentResult run_alpha0_estimate(const ExperimentConfig& cfg) {
  ExperimentResult result;
  paths::Alpha0Params ap;
  ap.horizon = 1.0;
  ap.n_max = 10;
  ap.mc.n_samples = cfg.samples(100, 30);

  std::vector<std::pair<double, double>> values;  // (c, estimate)
  int idx = 0;
  for (double c : {0.05, 1.0, 10.0}) {
    ap.c = c;
    ap.mc.seed = subseed(cfg, 120 + idx++);
    const auto est = paths::estimate_alpha0(ap);
    values.emplace_back(c, est.value);
  }
  result.checks.push_back(check_le("alpha0_small_c", values[0].second, 0.15));
  result.checks.push_back(check_ge("alpha0_large_c", values[2].second, 0.85));
  const bool monotone = values[0].second <= values[1].second &&
                        values[1].second <= values[2].second;
  result.checks.push_back(CheckResult{"alpha0_monotone_in_c", monotone,
                                      values[1].second, 0.0, ""});

  // dyadic statistics of a few paths: (path_index, n, t, delta, count)
  csv::Writer out(artifact_path(cfg, "path_stats.csv"),
                  {"path_index", "n", "t", "delta_minus", "m_minus"});
  const TimeGrid grid(1.0, 8192);
  for (std::size_t p = 0; p < 3; ++p) {
    const auto path =
        paths::simulate_wiener(grid, derive_stream_seed(subseed(cfg, 125), p));
    for (int n = 0; n <= 8; ++n) {
      for (double t : {0.25, 0.5, 0.75, 1.0}) {
        out.cell(p).cell(static_cast<std::int64_t>(n)).cell(t)
            .cell(paths::delta_minus(path, n, t))
            .cell(static_cast<std::int64_t>(paths::m_minus(path, n, 1.0, t)));
        out.end_row();
      }
    }
  }
  result.artifacts.push_back(artifact_path(cfg, "path_stats.csv"));
  return result;
}

// ---------------------------------------------------------------------------
// 13. weighted norm estimate ratio
// ---------------------------------------------------------------------------

ExperimentResult run_norm_estimate(const ExperimentConfig& cfg) {
  ExperimentResult result;
  const double sigma_val = 0.5, a_val = 1.0;
  const double horizon = 0.5;
  const double c = 1.0;

  auto prob = heat_problem(a_val, sigma_val, 0.0, 2.0);
  prob.f = [](double, double x) {
    if (x <= 0.25 || x >= 1.0) return 0.0;
    const double s = (x - 0.25) * (1.0 - x) / 0.140625;
    return 30.0 * s * s;
  };

  fd::SolveGrids grids;
  grids.space = fd::SpaceGrid(0.0, 2.0, 256);
  grids.time = TimeGrid(horizon, 16384);
  grids.store_every = 128;

  const std::size_t seeds = cfg.samples(200, 50);
  std::vector<fd::FieldSolution> ensemble(seeds);
  parallel_for(seeds, [&](std::size_t i) {
    const auto driver = paths::simulate_wiener(
        grids.time, derive_stream_seed(subseed(cfg, 130), i));
    ensemble[i] = fd::solve_spde(prob, grids, driver);
  });

  // constants and exponents
  paths::Alpha0Params ap;
  ap.c = c * std::sqrt(0.5);  // alpha0(c sqrt(delta1)), delta1 = 1/2
  ap.horizon = 1.0;
  ap.n_max = 9;
  ap.mc.n_samples = cfg.quick ? 30 : 80;
  ap.mc.seed = subseed(cfg, 131);
  const auto alpha0 = paths::estimate_alpha0(ap);
  const double alpha = std::clamp(alpha0.value * 0.9, 1e-3, 0.99);

  McParams gamma_mc;
  gamma_mc.n_samples = cfg.quick ? 5000 : 20000;
  gamma_mc.seed = subseed(cfg, 132);
  const auto gamma_est = strip::estimate_gamma(c, 1.0, 1.0, gamma_mc);
  const auto ec = norms::exponent_constants(4.0, alpha, c, 0.5, gamma_est.value);

  // pi series from the decay statistic over m <= m_max at a few times
  strip::DecayParams dp;
  dp.p = 4.0;
  dp.chi = ec.chi;
  dp.alpha = alpha;
  dp.nu = (1.0 + 0.5 * dp.p * dp.chi) / dp.p;
  dp.validate();

  const auto a_fn = [a_val](double) { return a_val; };
  const auto s_fn = [sigma_val](double) { return sigma_val; };
  const TimeGrid dgrid(horizon, 4096);
  const auto pi_driver = paths::simulate_wiener(dgrid, subseed(cfg, 133));
  const int m_max = static_cast<int>(cfg.get_long("strip_m_max", 8));
  const std::size_t reps = cfg.quick ? 150 : 400;

  std::vector<double> pi_series;
  std::uint64_t tag = 0;
  for (int i = 0; i <= 8; ++i) {
    const double t = horizon * static_cast<double>(i) / 8.0;
    double pi_t = 0.0;
    if (t > 0.0) {
      for (int m = 0; m <= m_max; ++m) {
        const auto xs = strip::log_x_grid(m, 12, 1e-3);
        std::vector<double> rh(xs.size());
        for (std::size_t q = 0; q < xs.size(); ++q) {
          McParams mc;
          mc.n_samples = reps;
          mc.seed = derive_stream_seed(subseed(cfg, 134), tag++);
          rh[q] = strip::v_m_representation(a_fn, s_fn, pi_driver, m, t, xs[q],
                                            mc)
                      .value;
        }
        pi_t = std::max(pi_t, strip::decay_statistic(xs, rh, dp, m, alpha));
      }
    }
    pi_series.push_back(pi_t);
  }

  const double theta = 0.5 * (ec.theta0 + 4.0);
  const double mu = std::max(0.2, std::min(ec.mu_sup - 0.05, theta - 2.0));

  csv::Writer tcsv(artifact_path(cfg, "tau_n.csv"), {"n", "tau_n"});
  csv::Writer ncsv(artifact_path(cfg, "norm_checks.csv"),
                   {"quantity", "p", "theta", "order", "tau", "value"});
  std::vector<double> ratios;
  bool all_finite = true;
  double prev_tau = 0.0;
  bool tau_monotone = true;
  for (int n = 1; n <= 5; ++n) {
    const double tau = norms::tau_n(pi_series, n, horizon);
    tau_monotone = tau_monotone && tau >= prev_tau;
    prev_tau = tau;
    tcsv.cell(static_cast<std::int64_t>(n)).cell(tau);
    tcsv.end_row();

    norms::NormEstimateParams np;
    np.p = 4.0;
    np.theta = theta;
    np.mu = mu;
    np.tau = tau;
    np.constants = ec;
    const auto rep = norms::check_norm_estimate(
        ensemble, prob.f, [](double, double) { return 0.0; }, np);
    all_finite = all_finite && rep.lhs_finite && std::isfinite(rep.ratio);
    ratios.push_back(rep.ratio);
    ncsv.cell(std::string("lhs_H2_inv_x^p")).cell(np.p).cell(np.theta)
        .cell(std::int64_t{2}).cell(tau).cell(rep.lhs);
    ncsv.end_row();
    ncsv.cell(std::string("rhs_core^p")).cell(np.p).cell(np.mu)
        .cell(std::int64_t{1}).cell(tau).cell(rep.rhs_core);
    ncsv.end_row();
  }
  result.artifacts.push_back(artifact_path(cfg, "tau_n.csv"));
  result.artifacts.push_back(artifact_path(cfg, "norm_checks.csv"));

  const double max_ratio = *std::max_element(ratios.begin(), ratios.end());
  const double min_ratio = *std::min_element(ratios.begin(), ratios.end());
  result.checks.push_back(CheckResult{"norm_sides_finite", all_finite,
                                      max_ratio, 0.0,
                                      "theta=" + csv::format_double(theta) +
                                          " mu=" + csv::format_double(mu)});
  // the truncated-grid ratio must not grow across stopping levels
  result.checks.push_back(check_le("norm_ratio_bounded_across_n", max_ratio,
                                   2.0 * min_ratio + 1e-12,
                                   "min=" + csv::format_double(min_ratio)));
  result.checks.push_back(CheckResult{"tau_n_nondecreasing", tau_monotone,
                                      prev_tau, horizon, ""});
  return result;
}

}  // namespace

const std::vector<ExperimentInfo>& registry() {
  static const std::vector<ExperimentInfo> table = {
      {"reflection_oracle", "remark_2_23_1",
       "Wiener minimum barrier probabilities vs the Gaussian tail closed form",
       run_reflection_oracle},
      {"gamma_bounds", "section_4",
       "contraction factor estimates vs the closed-form lower bound",
       run_gamma_bounds},
      {"ruin_oracle", "lemma_1_25_1",
       "constant-boundary strip exit vs the gambler's-ruin oracle",
       run_ruin_oracle},
      {"strip_bound_lemma_1_25_1", "eq_1_25_1",
       "hitting probabilities dominated by the oscillation-count bound",
       run_strip_bound},
      {"scaling_identity", "eq_1_25_2",
       "dyadic rescaling identity under common random numbers",
       run_scaling_identity},
      {"solver_oracles", "eq_2_22_3",
       "eigenmode decay, steady exit profile, Monte Carlo mean field",
       run_solver_oracles},
      {"energy_identity", "lemma_12_19_1",
       "discrete positive-part energy residual and ensemble Ito balance",
       run_energy_identity},
      {"max_principle_sweep", "theorem_1_14_1",
       "nonpositive data keep the field nonpositive across refinements",
       run_max_principle_sweep},
      {"comparison_barrier", "theorem_3_18_1",
       "comparison against the unit barrier and exact linearity self-check",
       run_comparison_barrier},
      {"envelope_lemma_2_22_1", "lemma_2_22_1",
       "solution dominated by the auxiliary field times the edge supremum",
       run_envelope},
      {"decay_exponent_remark_2_23_1", "remark_2_23_1",
       "decay statistic boundedness, fitted boundary exponent, constants",
       run_decay_machinery},
      {"alpha0_estimate", "section_4",
       "normalized quiet-level counts concentrate and respond to c",
       run_alpha0_estimate},
      {"norm_estimate_theorem_2_7_1", "theorem_2_7_1",
       "weighted-norm a-priori ratio stays finite across stopping levels",
       run_norm_estimate},
  };
  return table;
}

}  // namespace spdemax::runner
