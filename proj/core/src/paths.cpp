#include "spdemax/paths.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

#include "spdemax/parallel.hpp"
#include "spdemax/rng.hpp"

namespace spdemax::paths {

SamplePath simulate_wiener(const TimeGrid& grid, std::uint64_t seed) {
  if (!(grid.horizon > 0.0) || grid.steps < 1)
    throw std::invalid_argument("simulate_wiener: invalid grid");
  NormalStream normals(seed);
  const double step_sd = std::sqrt(grid.dt());
  std::vector<double> values(grid.points());
  values[0] = 0.0;
  for (std::size_t j = 1; j < values.size(); ++j)
    values[j] = values[j - 1] + step_sd * normals.next();
  return SamplePath(grid, std::move(values), seed);
}

namespace {

// Inclusive index window of grid points inside [t_lo, t_hi]; the flat
// pre-history collapses onto index 0. Returns false if no grid point lies in
// the window.
bool window_indices(const TimeGrid& grid, double t_lo, double t_hi,
                    std::size_t& lo, std::size_t& hi) {
  const double dt = grid.dt();
  const std::size_t last = grid.steps;
  if (t_hi < 0.0) {  // entirely in pre-history
    lo = hi = 0;
    return true;
  }
  const double hi_pos = t_hi / dt;
  hi = hi_pos >= static_cast<double>(last)
           ? last
           : static_cast<std::size_t>(std::floor(hi_pos + 1e-9));
  if (t_lo <= 0.0) {
    lo = 0;
    return true;
  }
  const double lo_pos = t_lo / dt;
  const double lo_ceil = std::ceil(lo_pos - 1e-9);
  if (lo_ceil > static_cast<double>(last)) return false;
  lo = static_cast<std::size_t>(lo_ceil);
  return lo <= hi;
}

}  // namespace

double oscillation(const SamplePath& path, double t_lo, double t_hi) {
  if (t_lo > t_hi) throw std::invalid_argument("oscillation: t_lo > t_hi");
  std::size_t lo = 0, hi = 0;
  if (!window_indices(path.grid, t_lo, t_hi, lo, hi)) return 0.0;
  const auto [min_it, max_it] =
      std::minmax_element(path.values.begin() + static_cast<std::ptrdiff_t>(lo),
                          path.values.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
  return *max_it - *min_it;
}

double delta_minus(const SamplePath& path, int n, double t) {
  if (n < 0) throw std::invalid_argument("delta_minus: n must be >= 0");
  if (t < 0.0) throw std::invalid_argument("delta_minus: t must be >= 0");
  const double window = std::ldexp(1.0, -n);  // 2^{-n}
  return std::exp2(0.5 * n) * oscillation(path, t - window, t);
}

int m_minus(const SamplePath& path, int n, double c, double t) {
  if (!(c > 0.0)) throw std::invalid_argument("m_minus: c must be > 0");
  if (t < 0.0) throw std::invalid_argument("m_minus: t must be >= 0");
  if (n < 0) return 0;
  int count = 0;
  for (int k = 0; k <= n; ++k)
    if (delta_minus(path, k, t) <= c) ++count;
  return count;
}

std::vector<double> delta_minus_profile(const SamplePath& path, int n) {
  if (n < 0) throw std::invalid_argument("delta_minus_profile: n must be >= 0");
  const auto n_points = path.values.size();
  const double dt = path.grid.dt();
  // Window length in grid steps; left edge clamps at 0 (flat pre-history).
  const auto width = static_cast<std::size_t>(
      std::floor(std::ldexp(1.0, -n) / dt + 1e-9));
  const double scale = std::exp2(0.5 * n);

  std::vector<double> out(n_points);
  std::deque<std::size_t> max_q, min_q;  // monotone index deques
  for (std::size_t j = 0; j < n_points; ++j) {
    const double v = path.values[j];
    while (!max_q.empty() && path.values[max_q.back()] <= v) max_q.pop_back();
    max_q.push_back(j);
    while (!min_q.empty() && path.values[min_q.back()] >= v) min_q.pop_back();
    min_q.push_back(j);
    const std::size_t left = j > width ? j - width : 0;
    while (max_q.front() < left) max_q.pop_front();
    while (min_q.front() < left) min_q.pop_front();
    out[j] = scale * (path.values[max_q.front()] - path.values[min_q.front()]);
  }
  return out;
}

std::vector<int> m_minus_profile(const SamplePath& path, int n_max, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("m_minus_profile: c must be > 0");
  std::vector<int> counts(path.values.size(), 0);
  if (n_max < 0) return counts;
  for (int k = 0; k <= n_max; ++k) {
    const auto deltas = delta_minus_profile(path, k);
    for (std::size_t j = 0; j < counts.size(); ++j)
      if (deltas[j] <= c) ++counts[j];
  }
  return counts;
}

double alpha0_path_statistic(const SamplePath& path, double c, int n_max) {
  if (n_max < 0) throw std::invalid_argument("alpha0_path_statistic: n_max >= 0");
  const auto counts = m_minus_profile(path, n_max, c);
  const int inf_count = *std::min_element(counts.begin(), counts.end());
  return static_cast<double>(inf_count) / static_cast<double>(n_max + 1);
}

McEstimate estimate_alpha0(const Alpha0Params& params) {
  if (!(params.c > 0.0)) throw std::invalid_argument("estimate_alpha0: c > 0 required");
  if (params.n_max < 0) throw std::invalid_argument("estimate_alpha0: n_max >= 0 required");
  if (!(params.horizon > 0.0))
    throw std::invalid_argument("estimate_alpha0: horizon > 0 required");
  params.mc.validate();

  const double finest = std::ldexp(1.0, -params.n_max) / 8.0;
  double dt = params.mc.dt > 0.0 ? params.mc.dt : finest;
  if (dt > finest * (1.0 + 1e-12))
    throw std::invalid_argument("estimate_alpha0: grid too coarse for n_max");
  const auto steps =
      static_cast<std::size_t>(std::ceil(params.horizon / dt - 1e-9));
  const TimeGrid grid(params.horizon, steps);

  const std::size_t n = params.mc.n_samples;
  std::vector<double> stats(n);
  parallel_for(n, [&](std::size_t i) {
    const auto path =
        simulate_wiener(grid, derive_stream_seed(params.mc.seed, i));
    stats[i] = alpha0_path_statistic(path, params.c, params.n_max);
  });

  std::vector<double> sorted = stats;
  std::sort(sorted.begin(), sorted.end());
  const double median = n % 2 == 1
                            ? sorted[n / 2]
                            : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  double mean = 0.0;
  for (double s : stats) mean += s;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double s : stats) var += (s - mean) * (s - mean);
  var = n > 1 ? var / static_cast<double>(n - 1) : 0.0;

  McEstimate est;
  est.value = median;
  est.std_error = std::sqrt(var / static_cast<double>(n));
  est.n_samples = n;
  est.seed = params.mc.seed;
  return est;
}

}  // namespace spdemax::paths
