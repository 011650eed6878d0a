#include <benchmark/benchmark.h>

#include "spdemax/fd.hpp"
#include "spdemax/paths.hpp"
#include "spdemax/strip.hpp"

using namespace spdemax;

static void BM_simulate_wiener(benchmark::State& state) {
  const paths::TimeGrid grid(1.0, static_cast<std::size_t>(state.range(0)));
  std::uint64_t seed = 1;
  for (auto _ : state) {
    auto path = paths::simulate_wiener(grid, seed++);
    benchmark::DoNotOptimize(path.values.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_simulate_wiener)->Arg(1 << 12)->Arg(1 << 16);

static void BM_m_minus_profile(benchmark::State& state) {
  const paths::TimeGrid grid(1.0, 8192);
  const auto path = paths::simulate_wiener(grid, 7);
  for (auto _ : state) {
    auto counts = paths::m_minus_profile(path, static_cast<int>(state.range(0)), 1.0);
    benchmark::DoNotOptimize(counts.data());
  }
}
BENCHMARK(BM_m_minus_profile)->Arg(6)->Arg(10);

static void BM_strip_exit(benchmark::State& state) {
  const paths::TimeGrid grid(4.0, 4096);
  strip::StripProblem prob;
  prob.boundary = paths::simulate_wiener(grid, 3);
  prob.m = 0;
  prob.t = 3.0;
  prob.x = 0.4;
  prob.delta = 1.0;
  paths::McParams mc;
  mc.n_samples = static_cast<std::size_t>(state.range(0));
  mc.seed = 1;
  for (auto _ : state) {
    auto est = strip::estimate_r_m(prob, mc);
    benchmark::DoNotOptimize(est.value);
    ++mc.seed;
  }
}
BENCHMARK(BM_strip_exit)->Arg(256)->Arg(1024);

static void BM_spde_step(benchmark::State& state) {
  fd::SpdeProblem prob;
  prob.a = [](double) { return 1.0; };
  prob.sigma = [](double) { return 0.5; };
  prob.delta0 = 0.25;
  prob.delta1 = 0.5;
  prob.ic = [](double x) { return x * (1.0 - x); };
  fd::SolveGrids grids;
  grids.space = fd::SpaceGrid(0.0, 1.0, static_cast<std::size_t>(state.range(0)));
  const double dx = grids.space.dx();
  const auto steps = static_cast<std::size_t>(0.01 / (dx * dx / 2.0)) + 1;
  grids.time = paths::TimeGrid(0.01, steps);
  grids.store_every = steps;
  std::uint64_t seed = 1;
  for (auto _ : state) {
    const auto driver = paths::simulate_wiener(grids.time, seed++);
    auto sol = fd::solve_spde(prob, grids, driver);
    benchmark::DoNotOptimize(sol.values.data());
  }
  state.SetItemsProcessed(state.iterations() * steps * grids.space.points());
}
BENCHMARK(BM_spde_step)->Arg(128)->Arg(256);

BENCHMARK_MAIN();
