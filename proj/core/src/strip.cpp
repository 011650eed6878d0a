#include "spdemax/strip.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>

#include "spdemax/parallel.hpp"
#include "spdemax/paths.hpp"
#include "spdemax/rng.hpp"

namespace spdemax::strip {

namespace {

constexpr double kInvSqrt2 = 0.7071067811865475244;

McEstimate bernoulli_estimate(std::size_t successes, std::size_t n,
                              std::uint64_t seed) {
  McEstimate est;
  est.n_samples = n;
  est.seed = seed;
  const double p = static_cast<double>(successes) / static_cast<double>(n);
  est.value = p;
  // sample sd / sqrt(n) with the n-1 normalization
  const double var = n > 1 ? p * (1.0 - p) * static_cast<double>(n) /
                                 static_cast<double>(n - 1)
                           : 0.0;
  est.std_error = std::sqrt(var / static_cast<double>(n));
  return est;
}

}  // namespace

double gamma_lower_bound(double c, double d) {
  if (!(d > 0.0)) throw std::invalid_argument("gamma_lower_bound: d must be > 0");
  if (c < 0.0) throw std::invalid_argument("gamma_lower_bound: c must be >= 0");
  return (c + d * kInvSqrt2) / (c + d);
}

McEstimate estimate_gamma(double c, double d, double delta, const McParams& mc) {
  if (c < 0.0 || !(d > 0.0) || !(delta > 0.0))
    throw std::invalid_argument("estimate_gamma: need c >= 0, d > 0, delta > 0");
  mc.validate();
  if (mc.n_samples < 100)
    throw std::invalid_argument("estimate_gamma: n_samples >= 100 required");

  const double horizon = 0.5 * delta;
  const double dt = mc.dt > 0.0 ? mc.dt : horizon / 2048.0;
  if (dt >= horizon)
    throw std::invalid_argument("estimate_gamma: grid does not resolve delta/2");
  const auto steps = static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9));
  const double step_sd = std::sqrt(horizon / static_cast<double>(steps));
  const double lo_barrier = -c - d * kInvSqrt2;
  const double hi_barrier = d - d * kInvSqrt2;

  std::atomic<std::size_t> hits{0};
  parallel_for(mc.n_samples, [&](std::size_t i) {
    NormalStream normals(derive_stream_seed(mc.seed, i));
    double w = 0.0, w_min = 0.0, w_max = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
      w += step_sd * normals.next();
      w_min = std::min(w_min, w);
      w_max = std::max(w_max, w);
      if (w_max > hi_barrier) break;  // event requires max <= hi throughout
    }
    if (w_min <= lo_barrier && w_max <= hi_barrier)
      hits.fetch_add(1, std::memory_order_relaxed);
  });

  auto est = bernoulli_estimate(hits.load(), mc.n_samples, mc.seed);
  est.value = 1.0 - est.value;  // gamma = 1 - P(event)
  return est;
}

DyadicIndices dyadic_indices(double y, double d_arg) {
  if (!(y > 0.0) || !(d_arg > 0.0))
    throw std::invalid_argument("dyadic_indices: inputs must be > 0");
  DyadicIndices idx;
  idx.n = static_cast<int>(std::floor(std::max(0.0, -2.0 * std::log2(y))));
  idx.k = 2 + static_cast<int>(std::floor(std::max(0.0, 2.0 * std::log2(d_arg))));
  return idx;
}

double StripProblem::width() const { return std::exp2(-0.5 * m); }

void StripProblem::validate() const {
  if (m < 0) throw std::invalid_argument("StripProblem: m must be >= 0");
  if (t < 0.0) throw std::invalid_argument("StripProblem: t must be >= 0");
  if (!(delta > 0.0)) throw std::invalid_argument("StripProblem: delta must be > 0");
  if (!(x > 0.0) || !(x < width()))
    throw std::invalid_argument("StripProblem: x must lie in (0, 2^{-m/2})");
}

McEstimate estimate_r_m(const StripProblem& prob, const McParams& mc) {
  prob.validate();
  mc.validate();

  const double w_strip = prob.width();
  const double dt = mc.dt > 0.0 ? mc.dt : std::ldexp(1e-3, -prob.m);
  const auto steps = static_cast<std::size_t>(std::floor(prob.t / dt + 1e-9));
  const double step_sd = std::sqrt(prob.delta * dt);
  const double start = prob.boundary.value_at(prob.t) + prob.x;

  std::atomic<std::size_t> upper_exits{0};
  parallel_for(mc.n_samples, [&](std::size_t i) {
    NormalStream normals(derive_stream_seed(mc.seed, i));
    double y = start;
    for (std::size_t k = 1; k <= steps; ++k) {
      y += step_sd * normals.next();
      const double b = prob.boundary.value_at(prob.t - static_cast<double>(k) * dt);
      if (y >= b + w_strip) {
        upper_exits.fetch_add(1, std::memory_order_relaxed);
        return;
      }
      if (y <= b) return;  // lower exit: failure
    }
    // still inside when backward time reaches zero: failure
  });

  return bernoulli_estimate(upper_exits.load(), mc.n_samples, mc.seed);
}

double bound_r_m(const StripProblem& prob, double c, double d,
                 double gamma_value) {
  prob.validate();
  if (!(c > 0.0) || !(d > 0.0))
    throw std::invalid_argument("bound_r_m: c and d must be > 0");
  if (!(gamma_value > 0.0) || gamma_value > 1.0)
    throw std::invalid_argument("bound_r_m: gamma_value must be in (0, 1]");

  const auto idx = dyadic_indices(std::exp2(0.5 * prob.m) * prob.x / d, c + d);
  const int upper = paths::m_minus(prob.boundary, prob.m + idx.n, c, prob.t);
  const int lower = paths::m_minus(prob.boundary, prob.m - 1, c, prob.t);
  const int exponent = upper - lower - idx.k;
  return std::pow(gamma_value, exponent);
}

SamplePath rescale_boundary(const SamplePath& path, int m) {
  if (m < 0) throw std::invalid_argument("rescale_boundary: m must be >= 0");
  const double time_scale = std::exp2(m);
  const double value_scale = std::exp2(0.5 * m);
  if (!std::isfinite(path.grid.horizon * time_scale))
    throw std::invalid_argument("rescale_boundary: dilated horizon overflows");
  TimeGrid dilated(path.grid.horizon * time_scale, path.grid.steps);
  std::vector<double> values(path.values.size());
  for (std::size_t j = 0; j < values.size(); ++j)
    values[j] = value_scale * path.values[j];
  return SamplePath(dilated, std::move(values), path.seed);
}

double TimeChange::psi_at(double t) const {
  if (psi.empty()) throw std::invalid_argument("TimeChange: empty psi");
  if (t <= 0.0) return 0.0;
  if (t >= driver_grid.horizon) return psi.back();
  const double pos = t / driver_grid.dt();
  const auto j = static_cast<std::size_t>(pos);
  if (j + 1 >= psi.size()) return psi.back();
  const double w = pos - static_cast<double>(j);
  return psi[j] + w * (psi[j + 1] - psi[j]);
}

TimeChange time_change(const CoefficientFn& a, const CoefficientFn& sigma,
                       const SamplePath& driver) {
  const auto n_points = driver.values.size();
  const double dt = driver.grid.dt();

  std::vector<double> rate(n_points), sig(n_points);
  for (std::size_t j = 0; j < n_points; ++j) {
    const double t = driver.grid.time_at(j);
    const double aj = a(t);
    const double sj = sigma(t);
    rate[j] = aj - sj * sj;
    sig[j] = sj;
    if (!(rate[j] > 0.0))
      throw std::invalid_argument("time_change: a - sigma^2 must be > 0 on the grid");
  }

  TimeChange tc;
  tc.driver_grid = driver.grid;
  tc.psi.resize(n_points);
  tc.psi[0] = 0.0;
  for (std::size_t j = 1; j < n_points; ++j)
    tc.psi[j] = tc.psi[j - 1] + 0.5 * dt * (rate[j - 1] + rate[j]);

  const double psi_end = tc.psi.back();
  const std::size_t n_steps = driver.grid.steps;
  TimeGrid xi_grid(psi_end, n_steps);

  // phi: right-continuous inverse of psi on the xi grid, by monotone sweep
  // with linear interpolation.
  tc.phi.resize(n_points);
  std::size_t j = 0;
  for (std::size_t i = 0; i < n_points; ++i) {
    const double u = xi_grid.time_at(i);
    while (j + 1 < n_points && tc.psi[j + 1] < u) ++j;
    if (j + 1 >= n_points) {
      tc.phi[i] = driver.grid.horizon;
      continue;
    }
    const double span = tc.psi[j + 1] - tc.psi[j];
    const double w = span > 0.0 ? (u - tc.psi[j]) / span : 0.0;
    tc.phi[i] = driver.grid.time_at(j) + std::clamp(w, 0.0, 1.0) * dt;
  }
  tc.phi.back() = driver.grid.horizon;

  // xi(u_i) = Ito sum of sigma dw up to phi(u_i); the final partial step uses
  // the linearly interpolated driver increment.
  std::vector<double> xi_values(n_points);
  xi_values[0] = 0.0;
  double ito = 0.0;
  std::size_t full = 0;  // driver steps fully accumulated
  for (std::size_t i = 1; i < n_points; ++i) {
    const double target = tc.phi[i];
    while (full + 1 < n_points &&
           driver.grid.time_at(full + 1) <= target + 1e-15 * driver.grid.horizon) {
      ito += sig[full] * (driver.values[full + 1] - driver.values[full]);
      ++full;
    }
    double partial = 0.0;
    if (full + 1 < n_points) {
      const double frac = (target - driver.grid.time_at(full)) / dt;
      if (frac > 0.0)
        partial = sig[full] * frac * (driver.values[full + 1] - driver.values[full]);
    }
    xi_values[i] = ito + partial;
  }
  tc.xi = SamplePath(xi_grid, std::move(xi_values), driver.seed);
  return tc;
}

McEstimate v_m_representation(const CoefficientFn& a, const CoefficientFn& sigma,
                              const SamplePath& driver, int m, double t,
                              double x, const McParams& mc) {
  if (m < 0) throw std::invalid_argument("v_m_representation: m must be >= 0");
  if (t < 0.0) throw std::invalid_argument("v_m_representation: t must be >= 0");
  const double width = std::exp2(-0.5 * m);

  // Dirichlet values are exact at and beyond the lateral boundaries.
  if (x <= 0.0 || t == 0.0) {
    McEstimate est;
    est.value = x >= width ? 1.0 : 0.0;
    est.n_samples = mc.n_samples;
    est.seed = mc.seed;
    return est;
  }
  if (x >= width) {
    McEstimate est;
    est.value = 1.0;
    est.n_samples = mc.n_samples;
    est.seed = mc.seed;
    return est;
  }

  const TimeChange tc = time_change(a, sigma, driver);
  const double psi_t = tc.psi_at(t);

  StripProblem prob;
  prob.boundary = tc.xi;
  prob.m = m;
  prob.t = psi_t;
  prob.x = x;
  prob.delta = 1.0;
  return estimate_r_m(prob, mc);
}

void DecayParams::validate() const {
  if (!(p > 2.0)) throw std::invalid_argument("DecayParams: p must be > 2");
  if (!(chi > 0.0)) throw std::invalid_argument("DecayParams: chi must be > 0");
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw std::invalid_argument("DecayParams: alpha must lie in (0,1)");
  const double nu_p = nu * p;
  if (!(nu_p > 1.0) || !(nu_p < p * chi + 1.0))
    throw std::invalid_argument("DecayParams: need 1 < nu*p < p*chi + 1");
}

double decay_statistic(const std::vector<double>& xs,
                       const std::vector<double>& r_values,
                       const DecayParams& params, int m, double alpha) {
  params.validate();
  if (m < 0) throw std::invalid_argument("decay_statistic: m must be >= 0");
  if (!(alpha > 0.0)) throw std::invalid_argument("decay_statistic: alpha must be > 0");
  if (xs.size() != r_values.size())
    throw std::invalid_argument("decay_statistic: size mismatch");
  if (xs.size() < 2)
    throw std::invalid_argument("decay_statistic: need at least two samples");

  const double nu_p = params.nu * params.p;
  // trapezoid in log x of the density f(x) * x, f = x^{-nu p} r^p
  double integral = 0.0;
  auto density = [&](std::size_t i) {
    if (!(xs[i] > 0.0))
      throw std::invalid_argument("decay_statistic: x samples must be > 0");
    const double r = std::clamp(r_values[i], 0.0, 1.0);
    return std::pow(xs[i], -nu_p) * std::pow(r, params.p) * xs[i];
  };
  double prev = density(0);
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] > xs[i - 1]))
      throw std::invalid_argument("decay_statistic: x samples must increase");
    const double cur = density(i);
    integral += 0.5 * (prev + cur) * std::log(xs[i] / xs[i - 1]);
    prev = cur;
  }
  const double prefactor = std::exp2(-static_cast<double>(m) * (nu_p - 1.0) /
                                     (2.0 * alpha));
  return prefactor * integral;
}

std::vector<double> log_x_grid(int m, int per_decade, double cutoff) {
  if (m < 0) throw std::invalid_argument("log_x_grid: m must be >= 0");
  if (per_decade < 2) throw std::invalid_argument("log_x_grid: per_decade >= 2");
  if (!(cutoff > 0.0) || !(cutoff < 1.0))
    throw std::invalid_argument("log_x_grid: cutoff in (0,1) required");
  const double width = std::exp2(-0.5 * m);
  const double x_min = width * cutoff;
  const double decades = -std::log10(cutoff);
  const auto n_nodes =
      static_cast<std::size_t>(std::ceil(decades * per_decade)) + 1;
  std::vector<double> xs(n_nodes);
  const double log_lo = std::log(x_min);
  const double log_hi = std::log(width);
  for (std::size_t i = 0; i < n_nodes; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(n_nodes - 1);
    xs[i] = std::exp(log_lo + f * (log_hi - log_lo));
  }
  xs.back() = width * (1.0 - 1e-12);  // keep strictly inside the strip
  return xs;
}

}  // namespace spdemax::strip
