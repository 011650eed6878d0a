#pragma once

#include <functional>
#include <vector>

#include "spdemax/fd.hpp"

// Weighted space-time norms measuring boundary decay,
//
//   ||v||_{L_{p,theta}(tau)}^p = E int_0^tau int_0^inf x^{theta-1} |v|^p dx dt,
//   ||v||_{H^1} = ||v|| + ||M D_x v||,   ||v||_{H^2} = ||v||_{H^1} + ||M^2 D_x^2 v||,
//
// with M = multiplication by x, plus the exponent constants, the power-law
// fit of the boundary decay rate, and the stopping times tau_n that keep the
// decay integral below a level n.

namespace spdemax::norms {

using fd::FieldFn;
using fd::FieldSolution;

struct NormParams {
  double p = 4.0;
  double theta = 2.0;
  int order = 0;      // 0, 1 or 2
  double tau = 1.0;   // time horizon of the norm

  void validate() const;
};

/// Ensemble norm of the given order: the expectation is the ensemble mean,
/// space-time quadrature is midpoint-in-x (weights evaluated at cell centers,
/// which sidesteps the x = 0 singularity of x^{theta-1}) and trapezoid in t
/// up to params.tau. Difference quotients stand in for D_x and D_x^2.
double weighted_norm(const std::vector<FieldSolution>& ensemble,
                     const NormParams& params);

/// Same norm for the field u/x (the M^{-1} transform).
double weighted_norm_inv_x(const std::vector<FieldSolution>& ensemble,
                           const NormParams& params);

/// Norm of a deterministic field given as a callable on the grids of
/// `shape` (used for forcing-side norms).
double weighted_norm_of_fn(const FieldFn& v, const FieldSolution& shape,
                           const NormParams& params);

struct ExponentConstants {
  double theta0 = 0.0;   // p (1 + 2 alpha log2 gamma)
  double chi = 0.0;      // -2 alpha log2 gamma
  double epsilon0 = 0.0; // -2 alpha log2 gamma at the alpha0 estimate
  double mu_sup = 0.0;   // theta0 - 2 + 2 p (1 - alpha) log2 gamma
  bool degenerate = false;  // gamma == 1 boundary case
  // recorded inputs
  double p = 0.0, alpha = 0.0, c = 0.0, delta1 = 0.0, gamma_value = 0.0;
};

/// Closed-form constants; requires gamma_value in (1/sqrt(2), 1],
/// alpha in (0,1), p > 2. The two expressions for the mu bound agree to
/// machine precision by construction (checked).
ExponentConstants exponent_constants(double p, double alpha, double c,
                                     double delta1, double gamma_value);

/// Least-squares slope of log(values) against log(xs).
double fit_power_law(const std::vector<double>& xs,
                     const std::vector<double>& values);

/// Slope of log u(t, .) vs log x over grid nodes inside the window at the
/// stored row nearest t. Requires at least 8 strictly positive samples.
double fit_decay_exponent(const FieldSolution& field, double t, double x_min,
                          double x_max);

/// First time the trapezoid accumulation of pi (uniform samples on [0, T])
/// reaches n, capped at T. Nondecreasing in n; rejects negative pi values.
double tau_n(const std::vector<double>& pi_series, int n, double T);

struct NormEstimateParams {
  double p = 4.0;
  double theta = 3.0;
  double mu = 0.0;
  double tau = 1.0;
  ExponentConstants constants;  // gates the exponent preconditions
};

struct NormEstimateReport {
  double lhs = 0.0;        // ||M^{-1} u||^p_{H^2_{p,theta}(tau)}
  double rhs_core = 0.0;   // ||M f||^p_{L_{p,mu}} + ||g||^p_{H^1_{p,mu}}
  double ratio = 0.0;      // lhs / rhs_core (0 when both vanish)
  double tau_used = 0.0;
  bool lhs_finite = true;
  bool vacuous = false;    // f = g = 0 case
};

/// Desk-scale check of the weighted a-priori estimate: computes both sides
/// at the truncated grid scale and reports their ratio. Exponent
/// preconditions theta0 < theta < p and mu < mu_sup are enforced.
NormEstimateReport check_norm_estimate(const std::vector<FieldSolution>& u_ensemble,
                                       const FieldFn& f, const FieldFn& g,
                                       const NormEstimateParams& params);

}  // namespace spdemax::norms
