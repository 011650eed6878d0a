#pragma once

#include <cstddef>
#include <vector>

#include "spdemax/fd.hpp"
#include "spdemax/report.hpp"

// Numerical verifiers for the sign-preservation, comparison, barrier and
// envelope statements, plus pointwise checkers for the structural
// assumptions on the general coefficient set. Verifiers re-derive the
// hypotheses from the stored problem data instead of trusting caller flags:
// the conclusions are only meaningful under their hypotheses. Tolerances are
// relative to a problem scale so checks are grid- and magnitude-portable.

namespace spdemax::verify {

using fd::FieldSolution;
using fd::SpdeProblem;

/// Sign preservation: with f <= 0, g = 0, ic <= 0, bc <= 0 the solution
/// stays nonpositive. Reports max u+ against tol * scale with
/// scale = max|ic| + T max|f| + 1e-300. Throws if the problem data violate
/// the hypotheses.
Report verify_sign(const FieldSolution& sol, const SpdeProblem& prob,
                   double tol);

/// Comparison u <= rho * ubar for a nonnegative nondecreasing sequence rho
/// given per stored row. Both solutions must share grids and driving noise.
/// Data hypotheses are checked on the discrete set {u > rho ubar} (strict
/// inequality; ties impose no constraint).
Report verify_comparison(const FieldSolution& u, const SpdeProblem& prob_u,
                         const FieldSolution& ubar,
                         const SpdeProblem& prob_ubar,
                         const std::vector<double>& rho, double tol);

struct EnvelopeResult {
  Report report;          // strict all-points verdict
  double pass_fraction;   // share of strip grid points satisfying the bound
  double sup_edge;        // running sup of |u| on the outer strip edge at T
};

/// Envelope domination: |u(t,x)| <= v_m(t,x) * sup_{s<=t} |u(s, 2^{-m/2})|
/// + tol * scale on the strip x < 2^{-m/2}, where scale is the final edge
/// sup. u must come from data vanishing on x <= 2^{-m/2} and share driving
/// noise with v_m.
EnvelopeResult verify_envelope(const FieldSolution& u,
                               const SpdeProblem& prob_u,
                               const FieldSolution& v_m, int m, double tol);

/// Coefficient fields of the general first-order system on one time slice
/// of a uniform spatial box grid, flattened C-order. eta is derived from the
/// definitional identity eta^i = a1^i - b^i - (sigma^i, nu) - xi^i.
struct CoefficientFields {
  std::size_t dim = 1;                 // spatial dimension d
  std::size_t noise_dim = 1;           // sigma columns
  std::vector<std::size_t> shape;      // nodes per dimension
  std::vector<double> spacing;         // grid spacing per dimension
  std::vector<double> a;               // d x d per node (row-major)
  std::vector<double> b;               // d per node
  std::vector<double> a1;              // d per node (zeroth-order a^i)
  std::vector<double> c;               // scalar per node
  std::vector<double> sigma;           // d x k per node
  std::vector<double> nu;              // k per node
  std::vector<double> xi;              // d per node
  double K1 = 1.0;                     // parabolicity bound, > 0
  double K2 = 0.0;                     // divergence bound, >= 0

  std::size_t nodes() const;
  void validate() const;
  /// eta^i at a node.
  double eta(std::size_t node, std::size_t i) const;
};

/// Pointwise evaluation of the parabolicity inequality
///   |sum_i lambda^i xi^i|^2 <= K1 (2 a^{ij} - alpha^{ij}) lambda^i lambda^j,
/// alpha = sigma sigma^T, over the supplied direction samples, and of the
/// divergence bound D_i eta^i - 2c + |nu|^2 <= K2 (centered differences).
/// The report carries the worst margin (<= 0 when both hold).
Report check_assumptions(const CoefficientFields& cf,
                         const std::vector<std::vector<double>>& lambda_samples);

}  // namespace spdemax::verify
