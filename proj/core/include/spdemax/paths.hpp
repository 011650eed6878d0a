#pragma once

#include <cstdint>
#include <vector>

#include "spdemax/time_grid.hpp"

// Wiener path simulation and backward dyadic oscillation statistics.
//
// For a path x on a uniform grid, the level-n statistic is
//   delta_minus(x, n, t) = 2^{n/2} * osc of x over [t - 2^{-n}, t],
// with the path extended flat before time zero, and
//   m_minus(x, n, c, t)  = #{k in 0..n : delta_minus(x, k, t) <= c}
// (zero for negative n). For Wiener paths, inf_t m_minus/(n+1) approaches a
// deterministic limit alpha0(c) as n grows; estimate_alpha0 is the empirical
// desk-scale proxy for that limit.

namespace spdemax::paths {

/// Simulates a standard Wiener path on `grid`: values[0] = 0, independent
/// Gaussian increments of variance dt. Deterministic given (grid, seed).
SamplePath simulate_wiener(const TimeGrid& grid, std::uint64_t seed);

/// Max minus min of path values over grid points in [t_lo, t_hi]; times at
/// or before zero contribute the initial value. Empty windows (no grid point
/// between two consecutive samples) give 0.
double oscillation(const SamplePath& path, double t_lo, double t_hi);

/// 2^{n/2} * oscillation over the backward window [t - 2^{-n}, t]. n >= 0.
double delta_minus(const SamplePath& path, int n, double t);

/// Count of levels k in 0..n with delta_minus <= c. Returns 0 for n < 0.
int m_minus(const SamplePath& path, int n, double c, double t);

/// delta_minus(path, n, t_j) for every grid index j at a fixed level n,
/// computed with a sliding-window min/max pass (O(N) per level).
std::vector<double> delta_minus_profile(const SamplePath& path, int n);

/// m_minus(path, n_max, c, t_j) for every grid index j.
std::vector<int> m_minus_profile(const SamplePath& path, int n_max, double c);

struct Alpha0Params {
  double c = 1.0;
  double horizon = 1.0;
  int n_max = 10;
  McParams mc{};
};

/// Median across simulated Wiener paths of
///   inf_{t in grid} m_minus(w, n_max, c, t) / (n_max + 1),
/// reported with the ensemble dispersion (sd/sqrt(n)) as std_error
/// surrogate. The grid must resolve the finest dyadic scale:
/// dt <= 2^{-n_max}/8 (the default when mc.dt == 0).
McEstimate estimate_alpha0(const Alpha0Params& params);

/// Per-path normalized infimum; building block of estimate_alpha0, exposed
/// for diagnostics and tests.
double alpha0_path_statistic(const SamplePath& path, double c, int n_max);

}  // namespace spdemax::paths
