#include "spdemax/fd.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "spdemax/csv.hpp"

namespace spdemax::fd {

SpaceGrid::SpaceGrid(double lo, double hi, std::size_t m)
    : x_lo(lo), x_hi(hi), cells(m) {
  if (!(hi > lo)) throw std::invalid_argument("SpaceGrid: x_hi must exceed x_lo");
  if (m < 2) throw std::invalid_argument("SpaceGrid: need at least two cells");
}

Report stability_check(const SpdeProblem& prob, const SolveGrids& grids) {
  const auto fail = [](double margin, std::string ctx,
                       std::optional<std::pair<double, double>> loc = {}) {
    return make_report("stability", margin, 0.0, loc, std::move(ctx));
  };

  if (grids.space.cells < 2 || !(grids.space.x_hi > grids.space.x_lo))
    return fail(1.0, "grid: degenerate space grid");
  if (grids.time.steps < 1 || !(grids.time.horizon > 0.0))
    return fail(1.0, "grid: degenerate time grid");
  if (grids.store_every < 1 || grids.time.steps % grids.store_every != 0)
    return fail(1.0, "grid: store_every must divide the step count");
  if (std::abs(grids.space.x_lo - prob.x_lo) > 1e-12 ||
      std::abs(grids.space.x_hi - prob.x_hi) > 1e-12)
    return fail(1.0, "grid: space grid does not span the problem interval");
  if (!(prob.delta0 > 0.0) || prob.delta0 > 1.0 || !(prob.delta1 > 0.0) ||
      prob.delta1 > 1.0)
    return fail(1.0, "coercivity: delta0, delta1 must lie in (0, 1]");

  const double dt = grids.time.dt();
  const double dx = grids.space.dx();

  double worst_margin = -1.0;
  // coercivity chain delta0 <= delta1 a <= a - sigma^2 <= 1/delta0 per step
  for (std::size_t n = 0; n <= grids.time.steps; ++n) {
    const double t = grids.time.time_at(n);
    const double at = prob.a_at(t);
    const double st = prob.sigma_at(t);
    const double diff = at - st * st;
    const double m1 = prob.delta0 - prob.delta1 * at;
    const double m2 = prob.delta1 * at - diff;
    const double m3 = diff - 1.0 / prob.delta0;
    const double m = std::max({m1, m2, m3});
    if (m > 0.0)
      return fail(m, "coercivity: delta0 <= delta1*a <= a - sigma^2 <= 1/delta0 violated",
                  std::pair{t, 0.0});
    worst_margin = std::max(worst_margin, m);
  }

  double max_a = 0.0;
  for (std::size_t n = 0; n <= grids.time.steps; ++n)
    max_a = std::max(max_a, prob.a_at(grids.time.time_at(n)));
  const double cfl_limit = dx * dx / (2.0 * max_a);
  const double cfl_margin = dt / cfl_limit - 1.0;
  if (cfl_margin > 0.0)
    return fail(cfl_margin, "cfl: dt must be <= dx^2 / (2 max a)");
  worst_margin = std::max(worst_margin, cfl_margin);

  return make_report("stability", worst_margin, 0.0, {}, "ok");
}

namespace {

// Thomas solve of (I - lambda D^2) u = rhs on interior nodes with Dirichlet
// values already folded into rhs. diag = 1 + 2 lambda, off = -lambda.
void tridiag_solve(double lambda, std::vector<double>& rhs,
                   std::vector<double>& scratch) {
  const std::size_t n = rhs.size();
  const double diag = 1.0 + 2.0 * lambda;
  const double off = -lambda;
  scratch.resize(n);
  double beta = diag;
  rhs[0] /= beta;
  for (std::size_t i = 1; i < n; ++i) {
    scratch[i] = off / beta;
    beta = diag - off * scratch[i];
    rhs[i] = (rhs[i] - off * rhs[i - 1]) / beta;
  }
  for (std::size_t i = n - 1; i-- > 0;)
    rhs[i] -= scratch[i + 1] * rhs[i + 1];
}

}  // namespace

FieldSolution solve_spde(const SpdeProblem& prob, const SolveGrids& grids,
                         const SamplePath& driver) {
  return solve_spde_observed(prob, grids, driver, {});
}

FieldSolution solve_spde_observed(const SpdeProblem& prob,
                                  const SolveGrids& grids,
                                  const SamplePath& driver,
                                  const StepObserver& observer) {
  const Report stability = stability_check(prob, grids);
  if (!stability.pass)
    throw std::invalid_argument("solve_spde: " + stability.to_line());
  if (driver.grid.steps != grids.time.steps ||
      std::abs(driver.grid.horizon - grids.time.horizon) >
          1e-12 * std::max(1.0, grids.time.horizon))
    throw std::invalid_argument("solve_spde: driver grid does not match time grid");

  const std::size_t m_nodes = grids.space.points();
  const std::size_t n_steps = grids.time.steps;
  const double dx = grids.space.dx();
  const double dt = grids.time.dt();
  const double inv_dx2 = 1.0 / (dx * dx);
  const double inv_2dx = 0.5 / dx;

  FieldSolution sol;
  sol.space = grids.space;
  sol.stored_time = TimeGrid(grids.time.horizon, n_steps / grids.store_every);
  sol.store_every = grids.store_every;
  sol.values.assign(sol.rows() * m_nodes, 0.0);
  sol.noise.assign(sol.rows() - 1, 0.0);
  sol.driver_seed = driver.seed;

  std::vector<double> u(m_nodes), rhs(m_nodes - 2), scratch;
  for (std::size_t j = 0; j < m_nodes; ++j)
    u[j] = prob.ic_at(grids.space.x_at(j));
  u[0] = prob.bc_lo_at(0.0);
  u[m_nodes - 1] = prob.bc_hi_at(0.0);
  std::copy(u.begin(), u.end(), sol.values.begin());

  for (std::size_t n = 0; n < n_steps; ++n) {
    const double t = grids.time.time_at(n);
    const double t_next = grids.time.time_at(n + 1);
    const double a_half = prob.a_at(t + 0.5 * dt);
    const double sigma_n = prob.sigma_at(t);
    const double dw = driver.values[n + 1] - driver.values[n];
    const double lambda = 0.25 * dt * a_half * inv_dx2;

    for (std::size_t j = 1; j + 1 < m_nodes; ++j) {
      const double x = grids.space.x_at(j);
      const double lap = (u[j + 1] - 2.0 * u[j] + u[j - 1]) * inv_dx2;
      const double grad = (u[j + 1] - u[j - 1]) * inv_2dx;
      rhs[j - 1] = u[j] + 0.25 * dt * a_half * lap + dt * prob.f_at(t, x) +
                   dw * (sigma_n * grad + prob.g_at(t, x));
    }
    const double lo = prob.bc_lo_at(t_next);
    const double hi = prob.bc_hi_at(t_next);
    rhs.front() += lambda * lo;
    rhs.back() += lambda * hi;
    tridiag_solve(lambda, rhs, scratch);

    u[0] = lo;
    u[m_nodes - 1] = hi;
    std::copy(rhs.begin(), rhs.end(), u.begin() + 1);

    if ((n + 1) % grids.store_every == 0) {
      const std::size_t row = (n + 1) / grids.store_every;
      std::copy(u.begin(), u.end(),
                sol.values.begin() + static_cast<std::ptrdiff_t>(row * m_nodes));
      sol.noise[row - 1] =
          driver.values[n + 1] - driver.values[(row - 1) * grids.store_every];
    }
    if (observer) observer(n + 1, u);
  }
  for (double v : sol.values)
    if (!std::isfinite(v))
      throw std::runtime_error("solve_spde: field blew up despite guards");
  return sol;
}

FieldSolution constant_solution(double value, const FieldSolution& like) {
  FieldSolution sol = like;
  std::fill(sol.values.begin(), sol.values.end(), value);
  return sol;
}

double row_l2_sq(const FieldSolution& sol, std::size_t row) {
  const double dx = sol.space.dx();
  const std::size_t m = sol.cols();
  double acc = 0.5 * (sol.at(row, 0) * sol.at(row, 0) +
                      sol.at(row, m - 1) * sol.at(row, m - 1));
  for (std::size_t j = 1; j + 1 < m; ++j) acc += sol.at(row, j) * sol.at(row, j);
  return acc * dx;
}

double row_pos_l2_sq(const FieldSolution& sol, std::size_t row) {
  const double dx = sol.space.dx();
  const std::size_t m = sol.cols();
  auto pos = [&](std::size_t j) { return std::max(0.0, sol.at(row, j)); };
  double acc = 0.5 * (pos(0) * pos(0) + pos(m - 1) * pos(m - 1));
  for (std::size_t j = 1; j + 1 < m; ++j) acc += pos(j) * pos(j);
  return acc * dx;
}

double row_grad_sq(const FieldSolution& sol, std::size_t row) {
  const double dx = sol.space.dx();
  double acc = 0.0;
  for (std::size_t j = 0; j + 1 < sol.cols(); ++j) {
    const double d = (sol.at(row, j + 1) - sol.at(row, j)) / dx;
    acc += d * d;
  }
  return acc * dx;
}

double row_centered_grad_sq(const FieldSolution& sol, std::size_t row) {
  const double dx = sol.space.dx();
  double acc = 0.0;
  for (std::size_t j = 1; j + 1 < sol.cols(); ++j) {
    const double d = (sol.at(row, j + 1) - sol.at(row, j - 1)) * 0.5 / dx;
    acc += d * d;
  }
  return acc * dx;
}

std::vector<double> energy_residual(const FieldSolution& sol,
                                    const SpdeProblem& prob) {
  if (sol.rows() < 2)
    throw std::invalid_argument("energy_residual: need at least two stored rows");
  if (sol.noise.size() + 1 != sol.rows())
    throw std::invalid_argument("energy_residual: noise/rows mismatch");

  const std::size_t m = sol.cols();
  const double dx = sol.space.dx();
  const double dt = sol.stored_time.dt();

  std::vector<double> residual(sol.rows(), 0.0);
  const double base = row_pos_l2_sq(sol, 0);
  double drift_acc = 0.0;
  double mart_acc = 0.0;

  std::vector<double> mid(m), pos_mid(m);
  for (std::size_t r = 0; r + 1 < sol.rows(); ++r) {
    const double t = sol.time_of_row(r);
    const double a_t = prob.a_at(t + 0.5 * dt);
    const double sigma_t = prob.sigma_at(t);

    for (std::size_t j = 0; j < m; ++j) {
      mid[j] = 0.5 * (sol.at(r, j) + sol.at(r + 1, j));
      pos_mid[j] = std::max(0.0, mid[j]);
    }

    // 2 (u+, f) with trapezoid weights
    double pair_f = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double w = (j == 0 || j + 1 == m) ? 0.5 : 1.0;
      pair_f += w * pos_mid[j] * prob.f_at(t, sol.space.x_at(j));
    }
    pair_f *= 2.0 * dx;

    // elliptic term in the first-order slot: -a ||D u+||^2 (cell differences)
    double grad_sq = 0.0;
    for (std::size_t j = 0; j + 1 < m; ++j) {
      const double d = (pos_mid[j + 1] - pos_mid[j]) / dx;
      grad_sq += d * d;
    }
    grad_sq *= dx;

    // quadratic variation of the noise forcing on {u > 0}
    double qv = 0.0;
    for (std::size_t j = 1; j + 1 < m; ++j) {
      if (sol.at(r, j) <= 0.0) continue;
      const double grad_c =
          (sol.at(r, j + 1) - sol.at(r, j - 1)) * 0.5 / dx;
      const double gk = sigma_t * grad_c + prob.g_at(t, sol.space.x_at(j));
      qv += gk * gk;
    }
    qv *= dx;

    drift_acc += dt * (pair_f - a_t * grad_sq + qv);

    // martingale increment 2 (u+, sigma D_c u + g) dw
    double pair_g = 0.0;
    for (std::size_t j = 1; j + 1 < m; ++j) {
      const double up = std::max(0.0, sol.at(r, j));
      if (up == 0.0) continue;
      const double grad_c =
          (sol.at(r, j + 1) - sol.at(r, j - 1)) * 0.5 / dx;
      pair_g += up * (sigma_t * grad_c + prob.g_at(t, sol.space.x_at(j)));
    }
    mart_acc += 2.0 * dx * pair_g * sol.noise[r];

    residual[r + 1] = row_pos_l2_sq(sol, r + 1) - base - drift_acc - mart_acc;
  }
  return residual;
}

void write_field_csv(const FieldSolution& sol, const std::string& path) {
  csv::Writer out(path, {"t", "x", "u"});
  for (std::size_t r = 0; r < sol.rows(); ++r) {
    const double t = sol.time_of_row(r);
    for (std::size_t j = 0; j < sol.cols(); ++j) {
      out.cell(t).cell(sol.space.x_at(j)).cell(sol.at(r, j));
      out.end_row();
    }
  }
}

namespace {
constexpr char kMagic[4] = {'S', 'P', 'F', 'D'};
constexpr std::uint32_t kDtypeF64 = 1;
}  // namespace

void write_field_binary(const FieldSolution& sol, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_field_binary: cannot open " + path);
  const std::uint32_t rows = static_cast<std::uint32_t>(sol.rows());
  const std::uint32_t cols = static_cast<std::uint32_t>(sol.cols());
  out.write(kMagic, 4);
  out.write(reinterpret_cast<const char*>(&rows), 4);
  out.write(reinterpret_cast<const char*>(&cols), 4);
  out.write(reinterpret_cast<const char*>(&kDtypeF64), 4);
  out.write(reinterpret_cast<const char*>(sol.values.data()),
            static_cast<std::streamsize>(sol.values.size() * sizeof(double)));
}

FieldSolution read_field_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_field_binary: cannot open " + path);
  char magic[4];
  std::uint32_t rows = 0, cols = 0, dtype = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&rows), 4);
  in.read(reinterpret_cast<char*>(&cols), 4);
  in.read(reinterpret_cast<char*>(&dtype), 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0 || dtype != kDtypeF64)
    throw std::runtime_error("read_field_binary: bad header in " + path);
  if (rows < 2 || cols < 3)
    throw std::runtime_error("read_field_binary: degenerate shape");
  FieldSolution sol;
  sol.space = SpaceGrid(0.0, 1.0, cols - 1);
  sol.stored_time = TimeGrid(1.0, rows - 1);
  sol.values.resize(static_cast<std::size_t>(rows) * cols);
  in.read(reinterpret_cast<char*>(sol.values.data()),
          static_cast<std::streamsize>(sol.values.size() * sizeof(double)));
  if (!in) throw std::runtime_error("read_field_binary: truncated payload");
  return sol;
}

}  // namespace spdemax::fd
