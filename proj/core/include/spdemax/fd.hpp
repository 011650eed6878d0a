#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "spdemax/report.hpp"
#include "spdemax/time_grid.hpp"

// Finite-difference solver for the one-dimensional SPDE
//
//   du_t = ((1/2) a_t D_x^2 u_t + f_t) dt + (sigma_t D_x u_t + g_t) dw_t
//
// on an interval with Dirichlet data. Drift advances by a Crank-Nicolson
// tridiagonal solve; the stochastic transport and g-forcing are explicit
// Euler-Maruyama with a centered first difference (the transport coefficient
// changes sign with dw, so upwinding has no preferred direction). Coercivity
// delta0 <= delta1 a <= a - sigma^2 <= 1/delta0 keeps the mean-square energy
// dissipative; the CFL bound dt <= dx^2 / (2 max a) guards the explicit part.

namespace spdemax::fd {

using paths::SamplePath;
using paths::TimeGrid;

struct SpaceGrid {
  double x_lo = 0.0;
  double x_hi = 1.0;
  std::size_t cells = 1;  // nodes = cells + 1

  SpaceGrid() = default;
  SpaceGrid(double lo, double hi, std::size_t m);
  double dx() const { return (x_hi - x_lo) / static_cast<double>(cells); }
  std::size_t points() const { return cells + 1; }
  double x_at(std::size_t j) const {
    return x_lo + static_cast<double>(j) * dx();
  }
};

using TimeFn = std::function<double(double)>;            // t -> value
using FieldFn = std::function<double(double, double)>;   // (t, x) -> value
using ProfileFn = std::function<double(double)>;         // x -> value

/// Problem data. Null callables mean identically zero (or, for `a`, one).
struct SpdeProblem {
  double x_lo = 0.0;
  double x_hi = 1.0;
  TimeFn a;          // diffusion coefficient a_t
  TimeFn sigma;      // transport noise coefficient sigma_t
  double delta0 = 0.25;
  double delta1 = 0.5;
  FieldFn f;         // drift forcing
  FieldFn g;         // noise forcing
  TimeFn bc_lo;      // Dirichlet value at x_lo
  TimeFn bc_hi;      // Dirichlet value at x_hi
  ProfileFn ic;      // initial profile

  double a_at(double t) const { return a ? a(t) : 1.0; }
  double sigma_at(double t) const { return sigma ? sigma(t) : 0.0; }
  double f_at(double t, double x) const { return f ? f(t, x) : 0.0; }
  double g_at(double t, double x) const { return g ? g(t, x) : 0.0; }
  double bc_lo_at(double t) const { return bc_lo ? bc_lo(t) : 0.0; }
  double bc_hi_at(double t) const { return bc_hi ? bc_hi(t) : 0.0; }
  double ic_at(double x) const { return ic ? ic(x) : 0.0; }
};

struct SolveGrids {
  SpaceGrid space;
  TimeGrid time;
  std::size_t store_every = 1;  // fine steps per stored row
};

/// Space-time field with the driving-noise increments that produced it.
/// Rows are stored every `store_every` fine steps; `noise[r]` is the driver
/// increment aggregated over stored interval r.
struct FieldSolution {
  SpaceGrid space;
  TimeGrid stored_time;
  std::size_t store_every = 1;
  std::vector<double> values;  // rows() x cols(), row-major
  std::vector<double> noise;   // rows() - 1 aggregated increments
  std::uint64_t driver_seed = 0;

  std::size_t rows() const { return stored_time.points(); }
  std::size_t cols() const { return space.points(); }
  double at(std::size_t row, std::size_t col) const {
    return values[row * cols() + col];
  }
  double& at(std::size_t row, std::size_t col) {
    return values[row * cols() + col];
  }
  double time_of_row(std::size_t row) const { return stored_time.time_at(row); }
};

/// Scheme guardrails: grid sanity, the CFL bound for the explicit noise
/// part, and the coercivity chain at every time grid point. The report
/// carries the first violation; margins are <= 0 when everything holds.
Report stability_check(const SpdeProblem& prob, const SolveGrids& grids);

/// One time-stepped field. Deterministic given (prob, grids, driver); the
/// driver grid must match grids.time. Throws if stability_check fails.
FieldSolution solve_spde(const SpdeProblem& prob, const SolveGrids& grids,
                         const SamplePath& driver);

/// Called after every fine step with (step index, current row). Lets sweeps
/// track per-step functionals without storing every row.
using StepObserver =
    std::function<void(std::size_t, const std::vector<double>&)>;

FieldSolution solve_spde_observed(const SpdeProblem& prob,
                                  const SolveGrids& grids,
                                  const SamplePath& driver,
                                  const StepObserver& observer);

/// Constant field sharing grids and noise with `like`; a valid solution of
/// the equation with zero data, used as a comparison barrier.
FieldSolution constant_solution(double value, const FieldSolution& like);

/// Running residual of the discrete positive-part energy identity
///   ||u+_t||^2 = ||u+_0||^2 + int h ds + m_t,
/// with the elliptic term folded into the first-order forcing slot. The
/// martingale part is accumulated from the stored noise increments. For
/// sigma = 0 and g = 0 the residual shrinks at first order in the stored
/// step (and vanishes to rounding for nonnegative fields with zero bc).
std::vector<double> energy_residual(const FieldSolution& sol,
                                    const SpdeProblem& prob);

/// Discrete L2(D) norm squared of a row (trapezoid weights).
double row_l2_sq(const FieldSolution& sol, std::size_t row);
/// Same for the positive part.
double row_pos_l2_sq(const FieldSolution& sol, std::size_t row);
/// Cell-difference gradient norm squared of a row.
double row_grad_sq(const FieldSolution& sol, std::size_t row);
/// Centered-difference gradient norm squared over interior nodes (the norm
/// in which the scheme injects transport-noise energy).
double row_centered_grad_sq(const FieldSolution& sol, std::size_t row);

/// CSV export with columns (t, x, u).
void write_field_csv(const FieldSolution& sol, const std::string& path);

/// Binary dump: 16-byte header (magic "SPFD", u32 rows, u32 cols, u32 dtype
/// tag = 1 for float64) followed by row-major float64 values.
void write_field_binary(const FieldSolution& sol, const std::string& path);

/// Reads back a binary dump (values and shape only).
FieldSolution read_field_binary(const std::string& path);

}  // namespace spdemax::fd
