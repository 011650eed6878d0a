#include "spdemax/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace spdemax::norms {

void NormParams::validate() const {
  if (!(p >= 2.0)) throw std::invalid_argument("NormParams: p must be >= 2");
  if (!(theta > 0.0) || !(theta < p))
    throw std::invalid_argument("NormParams: theta must lie in (0, p)");
  if (order < 0 || order > 2)
    throw std::invalid_argument("NormParams: order must be 0, 1 or 2");
  if (!(tau > 0.0)) throw std::invalid_argument("NormParams: tau must be > 0");
}

namespace {

// Midpoint-in-x integrand samples of one row for the three norm terms.
// term 0: |v|, term 1: |x D v|, term 2: |x^2 D^2 v|. Values are taken from
// the row accessor `val(j)`.
template <typename RowFn>
double row_term_integral(const RowFn& val, const fd::SpaceGrid& space,
                         double theta, double p, int term) {
  const double dx = space.dx();
  const std::size_t m = space.points();
  double acc = 0.0;
  for (std::size_t cell = 0; cell + 1 < m; ++cell) {
    const double x_mid = space.x_at(cell) + 0.5 * dx;
    double integrand;
    if (term == 0) {
      integrand = 0.5 * (val(cell) + val(cell + 1));
    } else if (term == 1) {
      integrand = x_mid * (val(cell + 1) - val(cell)) / dx;
    } else {
      auto second = [&](std::size_t j) {
        if (j == 0) j = 1;
        if (j + 1 >= m) j = m - 2;
        return (val(j + 1) - 2.0 * val(j) + val(j - 1)) / (dx * dx);
      };
      integrand = x_mid * x_mid * 0.5 * (second(cell) + second(cell + 1));
    }
    acc += std::pow(x_mid, theta - 1.0) * std::pow(std::abs(integrand), p) * dx;
  }
  return acc;
}

// Trapezoid-in-time accumulation of precomputed row integrals up to tau.
double time_integral(const fd::TimeGrid& stored, double tau,
                     const std::vector<double>& row_vals) {
  const double t_end = std::min(tau, stored.horizon);
  double acc = 0.0;
  for (std::size_t r = 0; r + 1 < row_vals.size(); ++r) {
    const double t0 = stored.time_at(r);
    if (t0 >= t_end) break;
    const double t1 = std::min(stored.time_at(r + 1), t_end);
    acc += 0.5 * (t1 - t0) * (row_vals[r] + row_vals[r + 1]);
  }
  return acc;
}

template <typename ValueAt>
double ensemble_norm(const std::vector<const FieldSolution*>& ensemble,
                     const NormParams& params, const ValueAt& value_at) {
  params.validate();
  if (ensemble.empty())
    throw std::invalid_argument("weighted_norm: empty ensemble");
  const auto& shape = *ensemble.front();
  for (const auto* f : ensemble)
    if (f->rows() != shape.rows() || f->cols() != shape.cols())
      throw std::invalid_argument("weighted_norm: ensemble grids differ");

  double norm_sum = 0.0;
  std::vector<double> row_vals(shape.rows());
  for (int term = 0; term <= params.order; ++term) {
    double mean_power = 0.0;
    for (const auto* field : ensemble) {
      for (std::size_t r = 0; r < field->rows(); ++r) {
        auto val = [&](std::size_t j) { return value_at(*field, r, j); };
        row_vals[r] =
            row_term_integral(val, field->space, params.theta, params.p, term);
      }
      mean_power += time_integral(field->stored_time, params.tau, row_vals);
    }
    mean_power /= static_cast<double>(ensemble.size());
    norm_sum += std::pow(mean_power, 1.0 / params.p);
  }
  return norm_sum;
}

std::vector<const FieldSolution*> as_pointers(
    const std::vector<FieldSolution>& ensemble) {
  std::vector<const FieldSolution*> out;
  out.reserve(ensemble.size());
  for (const auto& f : ensemble) out.push_back(&f);
  return out;
}

}  // namespace

double weighted_norm(const std::vector<FieldSolution>& ensemble,
                     const NormParams& params) {
  return ensemble_norm(as_pointers(ensemble), params,
                       [](const FieldSolution& f, std::size_t r, std::size_t j) {
                         return f.at(r, j);
                       });
}

double weighted_norm_inv_x(const std::vector<FieldSolution>& ensemble,
                           const NormParams& params) {
  return ensemble_norm(
      as_pointers(ensemble), params,
      [](const FieldSolution& f, std::size_t r, std::size_t j) {
        const double x = f.space.x_at(j);
        if (x > 0.0) return f.at(r, j) / x;
        // Dirichlet zero at the origin: u/x extends by the one-sided slope.
        const double x1 = f.space.x_at(1);
        return f.at(r, 1) / x1;
      });
}

double weighted_norm_of_fn(const FieldFn& v, const FieldSolution& shape,
                           const NormParams& params) {
  return ensemble_norm(
      {&shape}, params,
      [&](const FieldSolution& f, std::size_t r, std::size_t j) {
        return v(f.time_of_row(r), f.space.x_at(j));
      });
}

ExponentConstants exponent_constants(double p, double alpha, double c,
                                     double delta1, double gamma_value) {
  if (!(p > 2.0)) throw std::invalid_argument("exponent_constants: p must be > 2");
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw std::invalid_argument("exponent_constants: alpha must lie in (0,1)");
  constexpr double kInvSqrt2 = 0.7071067811865475244;
  if (!(gamma_value > kInvSqrt2) || gamma_value > 1.0)
    throw std::invalid_argument(
        "exponent_constants: gamma_value must lie in (1/sqrt(2), 1]");

  ExponentConstants ec;
  ec.p = p;
  ec.alpha = alpha;
  ec.c = c;
  ec.delta1 = delta1;
  ec.gamma_value = gamma_value;
  const double lg = std::log2(gamma_value);
  ec.theta0 = p * (1.0 + 2.0 * alpha * lg);
  ec.chi = -2.0 * alpha * lg;
  ec.epsilon0 = -2.0 * alpha * lg;
  ec.mu_sup = ec.theta0 - 2.0 + 2.0 * p * (1.0 - alpha) * lg;
  ec.degenerate = gamma_value >= 1.0;

  // the two closed forms of the mu bound must agree identically
  const double direct = p * (1.0 + 2.0 * lg) - 2.0;
  if (std::abs(direct - ec.mu_sup) > 1e-12 * std::max(1.0, std::abs(direct)))
    throw std::logic_error("exponent_constants: mu bound identity failed");
  return ec;
}

double fit_power_law(const std::vector<double>& xs,
                     const std::vector<double>& values) {
  if (xs.size() != values.size() || xs.size() < 2)
    throw std::invalid_argument("fit_power_law: need matching samples");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const auto n = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0) || !(values[i] > 0.0))
      throw std::invalid_argument("fit_power_law: samples must be positive");
    const double lx = std::log(xs[i]);
    const double ly = std::log(values[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (!(std::abs(denom) > 0.0))
    throw std::invalid_argument("fit_power_law: degenerate abscissae");
  return (n * sxy - sx * sy) / denom;
}

double fit_decay_exponent(const FieldSolution& field, double t, double x_min,
                          double x_max) {
  if (!(x_min > 0.0) || !(x_max > x_min))
    throw std::invalid_argument("fit_decay_exponent: bad window");
  const double dt = field.stored_time.dt();
  auto row = static_cast<std::size_t>(std::llround(t / dt));
  row = std::min(row, field.rows() - 1);

  std::vector<double> xs, vals;
  for (std::size_t j = 0; j < field.cols(); ++j) {
    const double x = field.space.x_at(j);
    if (x < x_min || x > x_max) continue;
    const double v = field.at(row, j);
    if (v > 0.0) {
      xs.push_back(x);
      vals.push_back(v);
    }
  }
  if (xs.size() < 8)
    throw std::invalid_argument(
        "fit_decay_exponent: fewer than 8 positive samples in window");
  return fit_power_law(xs, vals);
}

double tau_n(const std::vector<double>& pi_series, int n, double T) {
  if (pi_series.size() < 2)
    throw std::invalid_argument("tau_n: need at least two samples");
  if (n < 1) throw std::invalid_argument("tau_n: n must be >= 1");
  if (!(T > 0.0)) throw std::invalid_argument("tau_n: T must be > 0");
  for (double v : pi_series)
    if (v < 0.0) throw std::invalid_argument("tau_n: pi must be nonnegative");

  const double dt = T / static_cast<double>(pi_series.size() - 1);
  const double level = static_cast<double>(n);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < pi_series.size(); ++i) {
    const double inc = 0.5 * dt * (pi_series[i] + pi_series[i + 1]);
    if (acc + inc >= level) {
      const double frac = inc > 0.0 ? (level - acc) / inc : 1.0;
      return std::min(T, dt * (static_cast<double>(i) + frac));
    }
    acc += inc;
  }
  return T;
}

NormEstimateReport check_norm_estimate(const std::vector<FieldSolution>& u_ensemble,
                                       const FieldFn& f, const FieldFn& g,
                                       const NormEstimateParams& params) {
  const auto& ec = params.constants;
  if (!(params.theta > ec.theta0) || !(params.theta < params.p))
    throw std::invalid_argument(
        "check_norm_estimate: need theta0 < theta < p");
  if (!(params.mu < ec.mu_sup))
    throw std::invalid_argument("check_norm_estimate: mu exceeds its bound");
  if (u_ensemble.empty())
    throw std::invalid_argument("check_norm_estimate: empty ensemble");

  NormEstimateReport rep;
  rep.tau_used = params.tau;

  NormParams lhs_params{params.p, params.theta, 2, params.tau};
  const double lhs_norm = weighted_norm_inv_x(u_ensemble, lhs_params);
  rep.lhs = std::pow(lhs_norm, params.p);
  rep.lhs_finite = std::isfinite(rep.lhs);

  const auto& shape = u_ensemble.front();
  NormParams rhs_params{params.p, params.mu, 0, params.tau};
  auto xf = [&](double t, double x) { return x * f(t, x); };
  const double mf = weighted_norm_of_fn(xf, shape, rhs_params);
  NormParams g_params{params.p, params.mu, 1, params.tau};
  const double gn = weighted_norm_of_fn(g, shape, g_params);
  rep.rhs_core = std::pow(mf, params.p) + std::pow(gn, params.p);

  if (rep.rhs_core == 0.0 && rep.lhs == 0.0) {
    rep.vacuous = true;
    rep.ratio = 0.0;
  } else {
    rep.ratio = rep.rhs_core > 0.0
                    ? rep.lhs / rep.rhs_core
                    : std::numeric_limits<double>::infinity();
  }
  return rep;
}

}  // namespace spdemax::norms
