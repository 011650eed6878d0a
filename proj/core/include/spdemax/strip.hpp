#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "spdemax/time_grid.hpp"

// Moving-strip hitting probabilities and the machinery built on them.
//
// Around a continuous path x_. sits the strip of width 2^{-m/2},
//   Q_m = { (s, y) : s >= 0, x_s < y < x_s + 2^{-m/2} }.
// A Brownian particle started at height x above the path at time t walks
// backward in time; r_m(t, x) is the probability it leaves the strip through
// the upper boundary before original time zero. The contraction factor per
// dyadic oscillation level is
//   gamma(c, d, delta) = 1 - P(min_{s<=delta/2} w_s <= -c - d/sqrt(2),
//                              max_{s<=delta/2} w_s <= d - d/sqrt(2)),
// and r_m is bounded by a power of gamma whose exponent counts quiet
// oscillation levels of the boundary path.

namespace spdemax::strip {

using paths::McEstimate;
using paths::McParams;
using paths::SamplePath;
using paths::TimeGrid;

/// Closed-form lower bound (c + d/sqrt(2)) / (c + d); always > 1/sqrt(2).
double gamma_lower_bound(double c, double d);

/// Monte Carlo estimate of gamma(c, d, delta). Requires mc.n_samples >= 100;
/// the simulation grid resolves delta/2 with 2048 steps unless mc.dt is set.
McEstimate estimate_gamma(double c, double d, double delta, const McParams& mc);

struct DyadicIndices {
  int n = 0;  // n(y) = [(-2 log2 y)_+]
  int k = 2;  // k(d) = 2 + [(2 log2 d)_+]
};

DyadicIndices dyadic_indices(double y, double d_arg);

/// Strip-exit problem: particle starts at height x in (0, 2^{-m/2}) above
/// boundary(t) and diffuses at scale sqrt(delta) backward from time t.
struct StripProblem {
  SamplePath boundary;
  int m = 0;
  double t = 0.0;
  double x = 0.0;
  double delta = 1.0;

  double width() const;
  void validate() const;
};

/// Monte Carlo estimate of r_m: probability of exit through the upper strip
/// boundary before backward time reaches zero. Exit through the lower
/// boundary or running out of time counts as failure. Discrete-time crossing
/// check with step mc.dt (default 2^{-m} * 1e-3); no bridge correction.
McEstimate estimate_r_m(const StripProblem& prob, const McParams& mc);

/// Right-hand side of the hitting bound: gamma^e with
///   e = m_minus(boundary, m+n, c, t) - m_minus(boundary, m-1, c, t) - k,
/// n = n(2^{m/2} x / d), k = k(c + d). gamma_value is a previously computed
/// estimate (or the closed-form lower bound for a conservative check). May
/// exceed 1, in which case the bound is vacuous.
double bound_r_m(const StripProblem& prob, double c, double d,
                 double gamma_value);

/// Dyadic rescaling s -> 2^{m/2} x_{s 2^{-m}}: same sample count on the
/// 2^m-dilated grid. m = 0 is the identity.
SamplePath rescale_boundary(const SamplePath& path, int m);

using CoefficientFn = std::function<double(double)>;

/// Time change psi_t = int_0^t (a_s - sigma_s^2) ds with inverse phi and the
/// transported noise xi_t = int_0^{phi_t} sigma_s dw_s on the psi-clock grid.
struct TimeChange {
  TimeGrid driver_grid;
  std::vector<double> psi;  // on the driver grid
  std::vector<double> phi;  // on the xi grid (uniform over [0, psi_end])
  SamplePath xi;

  /// psi evaluated at an arbitrary time by linear interpolation.
  double psi_at(double t) const;
};

TimeChange time_change(const CoefficientFn& a, const CoefficientFn& sigma,
                       const SamplePath& driver);

/// Auxiliary solution v_m(t, x) evaluated through the probabilistic
/// representation: r_m of the xi-boundary at the changed time, with
/// diffusion scale delta = 1. Boundary values are exact: 0 at x <= 0 and
/// 1 at x >= 2^{-m/2}.
McEstimate v_m_representation(const CoefficientFn& a, const CoefficientFn& sigma,
                              const SamplePath& driver, int m, double t,
                              double x, const McParams& mc);

/// Exponent bookkeeping for the weighted decay integral. Requires chi > 0
/// and 1 < nu*p < p*chi + 1.
struct DecayParams {
  double p = 4.0;
  double nu = 0.3;
  double alpha = 0.25;
  double chi = 0.1;
  double c = 1.0;
  double d = 1.0;
  double delta = 1.0;

  void validate() const;
};

/// Weighted quadrature 2^{-m (nu p - 1)/(2 alpha)} *
/// int x^{-nu p} r(x)^p dx over log-spaced samples (trapezoid in log x).
double decay_statistic(const std::vector<double>& xs,
                       const std::vector<double>& r_values,
                       const DecayParams& params, int m, double alpha);

/// Log-spaced quadrature nodes in (0, 2^{-m/2}): `per_decade` nodes per
/// factor of 10, lower cutoff 2^{-m/2} * cutoff.
std::vector<double> log_x_grid(int m, int per_decade = 64,
                               double cutoff = 1e-4);

}  // namespace spdemax::strip
