#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace spdemax::paths {

/// Uniform time grid on [0, T] with N steps (N+1 points t_j = j*dt).
struct TimeGrid {
  double horizon = 1.0;
  std::size_t steps = 1;

  TimeGrid() = default;
  TimeGrid(double T, std::size_t N) : horizon(T), steps(N) {
    if (!(T > 0.0)) throw std::invalid_argument("TimeGrid: horizon must be > 0");
    if (N < 1) throw std::invalid_argument("TimeGrid: need at least one step");
  }

  double dt() const { return horizon / static_cast<double>(steps); }
  std::size_t points() const { return steps + 1; }
  double time_at(std::size_t j) const { return static_cast<double>(j) * dt(); }
};

/// Continuous path sampled on a uniform grid. Values before time zero follow
/// the pre-history convention: the path is flat at values[0] for s <= 0.
struct SamplePath {
  TimeGrid grid;
  std::vector<double> values;  // grid.points() entries
  std::uint64_t seed = 0;

  SamplePath() = default;
  SamplePath(TimeGrid g, std::vector<double> v, std::uint64_t s = 0)
      : grid(g), values(std::move(v)), seed(s) {
    if (values.size() != grid.points())
      throw std::invalid_argument("SamplePath: values.size() != grid points");
  }

  /// Piecewise-linear evaluation; s <= 0 returns values[0], s >= horizon
  /// returns the final value.
  double value_at(double s) const {
    if (s <= 0.0) return values.front();
    if (s >= grid.horizon) return values.back();
    const double pos = s / grid.dt();
    const auto j = static_cast<std::size_t>(pos);
    if (j + 1 >= values.size()) return values.back();
    const double w = pos - static_cast<double>(j);
    return values[j] + w * (values[j + 1] - values[j]);
  }
};

/// Monte Carlo run parameters. `dt` of zero means "operation default".
struct McParams {
  std::size_t n_samples = 1000;
  std::uint64_t seed = 0;
  double dt = 0.0;

  void validate() const {
    if (n_samples < 1) throw std::invalid_argument("McParams: n_samples >= 1 required");
    if (dt < 0.0) throw std::invalid_argument("McParams: dt must be >= 0");
  }
};

/// Monte Carlo estimate with reproducibility metadata: the same seed and
/// parameters always reproduce the same value.
struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
};

}  // namespace spdemax::paths
