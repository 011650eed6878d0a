#include "spdemax/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace spdemax::verify {

namespace {

constexpr double kScaleGuard = 1e-300;

double max_abs_ic(const FieldSolution& sol, const SpdeProblem& prob) {
  double m = 0.0;
  for (std::size_t j = 0; j < sol.cols(); ++j)
    m = std::max(m, std::abs(prob.ic_at(sol.space.x_at(j))));
  return m;
}

double max_abs_f(const FieldSolution& sol, const SpdeProblem& prob) {
  double m = 0.0;
  for (std::size_t r = 0; r < sol.rows(); ++r) {
    const double t = sol.time_of_row(r);
    for (std::size_t j = 0; j < sol.cols(); ++j)
      m = std::max(m, std::abs(prob.f_at(t, sol.space.x_at(j))));
  }
  return m;
}

void require_shared_grids(const FieldSolution& u, const FieldSolution& ubar) {
  const bool same_space = u.cols() == ubar.cols() &&
                          std::abs(u.space.x_lo - ubar.space.x_lo) < 1e-12 &&
                          std::abs(u.space.x_hi - ubar.space.x_hi) < 1e-12;
  const bool same_time =
      u.rows() == ubar.rows() &&
      std::abs(u.stored_time.horizon - ubar.stored_time.horizon) < 1e-12;
  if (!same_space || !same_time)
    throw std::invalid_argument("verify: solutions do not share grids");
  if (u.noise != ubar.noise)
    throw std::invalid_argument("verify: solutions do not share driving noise");
}

}  // namespace

Report verify_sign(const FieldSolution& sol, const SpdeProblem& prob,
                   double tol) {
  if (!(tol >= 0.0)) throw std::invalid_argument("verify_sign: tol must be >= 0");
  // Hypotheses, re-derived from the problem data on the stored grid.
  for (std::size_t j = 0; j < sol.cols(); ++j)
    if (prob.ic_at(sol.space.x_at(j)) > 0.0)
      throw std::invalid_argument("verify_sign: hypothesis ic <= 0 fails");
  for (std::size_t r = 0; r < sol.rows(); ++r) {
    const double t = sol.time_of_row(r);
    if (prob.bc_lo_at(t) > 0.0 || prob.bc_hi_at(t) > 0.0)
      throw std::invalid_argument("verify_sign: hypothesis bc <= 0 fails");
    for (std::size_t j = 0; j < sol.cols(); ++j) {
      const double x = sol.space.x_at(j);
      if (prob.f_at(t, x) > 0.0)
        throw std::invalid_argument("verify_sign: hypothesis f <= 0 fails");
      if (prob.g_at(t, x) != 0.0)
        throw std::invalid_argument("verify_sign: hypothesis g = 0 fails");
    }
  }

  const double scale = max_abs_ic(sol, prob) +
                       sol.stored_time.horizon * max_abs_f(sol, prob) +
                       kScaleGuard;
  double worst = 0.0;
  std::pair<double, double> where{0.0, 0.0};
  for (std::size_t r = 0; r < sol.rows(); ++r)
    for (std::size_t j = 0; j < sol.cols(); ++j)
      if (sol.at(r, j) > worst) {
        worst = sol.at(r, j);
        where = {sol.time_of_row(r), sol.space.x_at(j)};
      }
  return make_report("sign", worst, tol * scale, where,
                     "scale=" + std::to_string(scale));
}

Report verify_comparison(const FieldSolution& u, const SpdeProblem& prob_u,
                         const FieldSolution& ubar,
                         const SpdeProblem& prob_ubar,
                         const std::vector<double>& rho, double tol) {
  require_shared_grids(u, ubar);
  if (rho.size() != u.rows())
    throw std::invalid_argument("verify_comparison: rho must have one value per row");
  for (std::size_t r = 0; r < rho.size(); ++r) {
    if (rho[r] < 0.0)
      throw std::invalid_argument("verify_comparison: rho must be >= 0");
    if (r > 0 && rho[r] < rho[r - 1])
      throw std::invalid_argument("verify_comparison: rho must be nondecreasing");
  }

  // Data hypotheses on the discrete set {u > rho ubar}.
  double max_gap_f = 0.0;
  for (std::size_t r = 0; r < u.rows(); ++r) {
    const double t = u.time_of_row(r);
    for (std::size_t j = 0; j < u.cols(); ++j) {
      const double x = u.space.x_at(j);
      max_gap_f = std::max(max_gap_f, std::abs(prob_u.f_at(t, x) -
                                               rho[r] * prob_ubar.f_at(t, x)));
      if (u.at(r, j) > rho[r] * ubar.at(r, j)) {
        if (prob_u.f_at(t, x) - rho[r] * prob_ubar.f_at(t, x) > 0.0)
          throw std::invalid_argument(
              "verify_comparison: hypothesis f - rho fbar <= 0 fails on {u > rho ubar}");
        if (prob_u.g_at(t, x) - rho[r] * prob_ubar.g_at(t, x) != 0.0)
          throw std::invalid_argument(
              "verify_comparison: hypothesis g - rho gbar = 0 fails on {u > rho ubar}");
        if (ubar.at(r, j) < 0.0)
          throw std::invalid_argument(
              "verify_comparison: hypothesis ubar >= 0 fails on {u > rho ubar}");
      }
    }
  }

  double gap0 = 0.0;
  for (std::size_t j = 0; j < u.cols(); ++j)
    gap0 = std::max(gap0, std::abs(u.at(0, j) - rho[0] * ubar.at(0, j)));
  const double scale = gap0 + u.stored_time.horizon * max_gap_f + kScaleGuard;

  double worst = 0.0;
  std::pair<double, double> where{0.0, 0.0};
  for (std::size_t r = 0; r < u.rows(); ++r)
    for (std::size_t j = 0; j < u.cols(); ++j) {
      const double excess = u.at(r, j) - rho[r] * ubar.at(r, j);
      if (excess > worst) {
        worst = excess;
        where = {u.time_of_row(r), u.space.x_at(j)};
      }
    }
  return make_report("comparison", worst, tol * scale, where,
                     "scale=" + std::to_string(scale));
}

EnvelopeResult verify_envelope(const FieldSolution& u,
                               const SpdeProblem& prob_u,
                               const FieldSolution& v_m, int m, double tol) {
  if (m < 0) throw std::invalid_argument("verify_envelope: m must be >= 0");
  const double width = std::exp2(-0.5 * m);
  if (std::abs(v_m.space.x_lo) > 1e-12 ||
      std::abs(v_m.space.x_hi - width) > 1e-9)
    throw std::invalid_argument("verify_envelope: v_m must live on (0, 2^{-m/2})");
  if (u.rows() != v_m.rows() ||
      std::abs(u.stored_time.horizon - v_m.stored_time.horizon) > 1e-12)
    throw std::invalid_argument("verify_envelope: stored time grids differ");
  if (u.noise != v_m.noise)
    throw std::invalid_argument("verify_envelope: mismatched driving noise");

  // u's data must vanish on the strip closure.
  for (std::size_t r = 0; r < u.rows(); ++r) {
    const double t = u.time_of_row(r);
    for (std::size_t j = 0; j < u.cols(); ++j) {
      const double x = u.space.x_at(j);
      if (x <= width + 1e-12 &&
          (prob_u.f_at(t, x) != 0.0 || prob_u.g_at(t, x) != 0.0))
        throw std::invalid_argument(
            "verify_envelope: data must vanish for x <= 2^{-m/2}");
    }
  }

  // Outer-edge column of u (x = width) and the u-columns matching v nodes.
  const double dx_u = u.space.dx();
  const double edge_pos = (width - u.space.x_lo) / dx_u;
  const auto edge_col = static_cast<std::size_t>(std::llround(edge_pos));
  if (edge_col >= u.cols() ||
      std::abs(edge_pos - static_cast<double>(edge_col)) > 1e-9)
    throw std::invalid_argument(
        "verify_envelope: strip edge is not a grid node of u");

  std::vector<std::size_t> u_col(v_m.cols());
  for (std::size_t j = 0; j < v_m.cols(); ++j) {
    const double pos = (v_m.space.x_at(j) - u.space.x_lo) / dx_u;
    const auto col = static_cast<std::size_t>(std::llround(pos));
    if (col >= u.cols() || std::abs(pos - static_cast<double>(col)) > 1e-9)
      throw std::invalid_argument("verify_envelope: grids are not nested");
    u_col[j] = col;
  }

  double sup_edge = 0.0, worst = 0.0, sup_total = 0.0;
  std::size_t checked = 0, passed = 0;
  std::pair<double, double> where{0.0, 0.0};

  // First pass for the final scale.
  for (std::size_t r = 0; r < u.rows(); ++r)
    sup_total = std::max(sup_total, std::abs(u.at(r, edge_col)));
  const double scale = sup_total + kScaleGuard;

  for (std::size_t r = 0; r < u.rows(); ++r) {
    sup_edge = std::max(sup_edge, std::abs(u.at(r, edge_col)));
    for (std::size_t j = 0; j < v_m.cols(); ++j) {
      const double x = v_m.space.x_at(j);
      if (x >= width) continue;
      const double excess =
          std::abs(u.at(r, u_col[j])) - v_m.at(r, j) * sup_edge;
      ++checked;
      if (excess <= tol * scale) ++passed;
      if (excess > worst) {
        worst = excess;
        where = {u.time_of_row(r), x};
      }
    }
  }

  EnvelopeResult result;
  result.report = make_report("envelope", worst, tol * scale, where,
                              "scale=" + std::to_string(scale));
  result.pass_fraction =
      checked == 0 ? 1.0
                   : static_cast<double>(passed) / static_cast<double>(checked);
  result.sup_edge = sup_edge;
  return result;
}

std::size_t CoefficientFields::nodes() const {
  std::size_t n = 1;
  for (auto s : shape) n *= s;
  return n;
}

void CoefficientFields::validate() const {
  if (dim < 1) throw std::invalid_argument("CoefficientFields: dim >= 1");
  if (noise_dim < 1) throw std::invalid_argument("CoefficientFields: noise_dim >= 1");
  if (shape.size() != dim || spacing.size() != dim)
    throw std::invalid_argument("CoefficientFields: shape/spacing dimension mismatch");
  for (auto s : shape)
    if (s < 3) throw std::invalid_argument("CoefficientFields: need >= 3 nodes per dim");
  for (auto h : spacing)
    if (!(h > 0.0)) throw std::invalid_argument("CoefficientFields: spacing must be > 0");
  const std::size_t n = nodes();
  if (a.size() != n * dim * dim || b.size() != n * dim || a1.size() != n * dim ||
      c.size() != n || sigma.size() != n * dim * noise_dim ||
      nu.size() != n * noise_dim || xi.size() != n * dim)
    throw std::invalid_argument("CoefficientFields: field array size mismatch");
  if (!(K1 > 0.0)) throw std::invalid_argument("CoefficientFields: K1 must be > 0");
  if (K2 < 0.0) throw std::invalid_argument("CoefficientFields: K2 must be >= 0");
}

double CoefficientFields::eta(std::size_t node, std::size_t i) const {
  double dot = 0.0;
  for (std::size_t k = 0; k < noise_dim; ++k)
    dot += sigma[(node * dim + i) * noise_dim + k] * nu[node * noise_dim + k];
  return a1[node * dim + i] - b[node * dim + i] - dot - xi[node * dim + i];
}

namespace {

// node index <-> multi-index helpers for the C-order flattened box grid
std::size_t stride_of(const std::vector<std::size_t>& shape, std::size_t d) {
  std::size_t s = 1;
  for (std::size_t q = d + 1; q < shape.size(); ++q) s *= shape[q];
  return s;
}

std::vector<std::size_t> unflatten(std::size_t node,
                                   const std::vector<std::size_t>& shape) {
  std::vector<std::size_t> idx(shape.size());
  for (std::size_t d = shape.size(); d-- > 0;) {
    idx[d] = node % shape[d];
    node /= shape[d];
  }
  return idx;
}

}  // namespace

Report check_assumptions(const CoefficientFields& cf,
                         const std::vector<std::vector<double>>& lambda_samples) {
  cf.validate();
  if (lambda_samples.empty())
    throw std::invalid_argument("check_assumptions: need at least one direction");
  for (const auto& lam : lambda_samples) {
    if (lam.size() != cf.dim)
      throw std::invalid_argument("check_assumptions: direction dimension mismatch");
    double norm = 0.0;
    for (double v : lam) norm += v * v;
    if (!(norm > 0.0))
      throw std::invalid_argument("check_assumptions: directions must be nonzero");
  }

  const std::size_t n = cf.nodes();
  double worst = -std::numeric_limits<double>::infinity();
  std::pair<double, double> where{0.0, 0.0};
  std::string what = "ok";

  // (i) parabolicity in every sampled direction at every node
  for (std::size_t node = 0; node < n; ++node) {
    for (const auto& lam : lambda_samples) {
      double lhs = 0.0;
      for (std::size_t i = 0; i < cf.dim; ++i)
        lhs += lam[i] * cf.xi[node * cf.dim + i];
      lhs = lhs * lhs;
      double rhs = 0.0;
      for (std::size_t i = 0; i < cf.dim; ++i)
        for (std::size_t j = 0; j < cf.dim; ++j) {
          double alpha_ij = 0.0;
          for (std::size_t k = 0; k < cf.noise_dim; ++k)
            alpha_ij += cf.sigma[(node * cf.dim + i) * cf.noise_dim + k] *
                        cf.sigma[(node * cf.dim + j) * cf.noise_dim + k];
          rhs += (2.0 * cf.a[(node * cf.dim + i) * cf.dim + j] - alpha_ij) *
                 lam[i] * lam[j];
        }
      const double margin = lhs - cf.K1 * rhs;
      if (margin > worst) {
        worst = margin;
        where = {0.0, static_cast<double>(node)};
        what = "parabolicity";
      }
    }
  }

  // (ii) divergence bound D_i eta^i - 2c + |nu|^2 <= K2
  for (std::size_t node = 0; node < n; ++node) {
    const auto idx = unflatten(node, cf.shape);
    double div_eta = 0.0;
    for (std::size_t d = 0; d < cf.dim; ++d) {
      const std::size_t s = stride_of(cf.shape, d);
      const double h = cf.spacing[d];
      double fwd, bwd, denom;
      if (idx[d] == 0) {
        fwd = cf.eta(node + s, d);
        bwd = cf.eta(node, d);
        denom = h;
      } else if (idx[d] + 1 == cf.shape[d]) {
        fwd = cf.eta(node, d);
        bwd = cf.eta(node - s, d);
        denom = h;
      } else {
        fwd = cf.eta(node + s, d);
        bwd = cf.eta(node - s, d);
        denom = 2.0 * h;
      }
      div_eta += (fwd - bwd) / denom;
    }
    double nu_sq = 0.0;
    for (std::size_t k = 0; k < cf.noise_dim; ++k)
      nu_sq += cf.nu[node * cf.noise_dim + k] * cf.nu[node * cf.noise_dim + k];
    const double margin = div_eta - 2.0 * cf.c[node] + nu_sq - cf.K2;
    if (margin > worst) {
      worst = margin;
      where = {0.0, static_cast<double>(node)};
      what = "divergence";
    }
  }

  return make_report("assumptions", worst, 0.0, where, what);
}

}  // namespace spdemax::verify
