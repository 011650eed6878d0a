#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "spdemax/fd.hpp"
#include "spdemax/paths.hpp"
#include "spdemax/verify.hpp"

using namespace spdemax;
using paths::TimeGrid;

namespace {

fd::SpdeProblem base_problem(double a, double sigma, double x_hi = 1.0) {
  fd::SpdeProblem prob;
  prob.x_hi = x_hi;
  prob.a = [a](double) { return a; };
  prob.sigma = [sigma](double) { return sigma; };
  prob.delta0 = 0.25;
  prob.delta1 = 0.5;
  return prob;
}

}  // namespace

TEST_CASE("sign verifier: trivial pass, hypothesis guard, exact sigma=0") {
  fd::SolveGrids grids;
  grids.space = fd::SpaceGrid(0.0, 1.0, 64);
  grids.time = TimeGrid(0.05, 416);
  const auto driver = paths::simulate_wiener(grids.time, 1);

  {  // zero data
    auto prob = base_problem(1.0, 0.5);
    const auto sol = fd::solve_spde(prob, grids, driver);
    const auto rep = verify::verify_sign(sol, prob, 1e-6);
    CHECK(rep.pass);
    CHECK(rep.max_violation == 0.0);
    CHECK(rep.to_line().find("CHECK sign verdict=pass") == 0);
  }
  {  // nonpositive data, no noise: exactly zero violations
    auto prob = base_problem(1.0, 0.0);
    prob.ic = [](double x) { return -std::sin(oracles::kPi * x); };
    prob.f = [](double, double) { return -0.5; };
    const auto sol = fd::solve_spde(prob, grids, driver);
    const auto rep = verify::verify_sign(sol, prob, 0.0);
    CHECK(rep.pass);
    CHECK(rep.max_violation == 0.0);
  }
  {  // hypothesis failure: positive initial data must be rejected
    auto prob = base_problem(1.0, 0.0);
    prob.ic = [](double x) { return std::sin(oracles::kPi * x); };
    const auto sol = fd::solve_spde(prob, grids, driver);
    CHECK_THROWS_AS(verify::verify_sign(sol, prob, 1e-3),
                    std::invalid_argument);
  }
  {  // transport noise: small violations, within a loose relative gate
    auto prob = base_problem(1.0, 0.5);
    prob.ic = [](double x) { return -std::sin(oracles::kPi * x); };
    const auto sol = fd::solve_spde(prob, grids, driver);
    const auto rep = verify::verify_sign(sol, prob, 0.05);
    CHECK(rep.pass);
  }
}

TEST_CASE("comparison verifier basics") {
  fd::SolveGrids grids;
  grids.space = fd::SpaceGrid(0.0, 1.0, 64);
  grids.time = TimeGrid(0.05, 416);
  const auto driver = paths::simulate_wiener(grids.time, 2);

  auto prob = base_problem(1.0, 0.5);
  prob.ic = [](double x) { return 0.5 * std::sin(oracles::kPi * x); };
  const auto u = fd::solve_spde(prob, grids, driver);

  {  // u against itself with rho = 1
    const std::vector<double> rho(u.rows(), 1.0);
    const auto rep = verify::verify_comparison(u, prob, u, prob, rho, 0.0);
    CHECK(rep.pass);
    CHECK(rep.max_violation == 0.0);
  }
  {  // rho must be nondecreasing and nonnegative
    std::vector<double> rho(u.rows(), 1.0);
    rho.back() = 0.5;
    CHECK_THROWS_AS(verify::verify_comparison(u, prob, u, prob, rho, 0.0),
                    std::invalid_argument);
  }
  {  // mismatched noise is rejected
    const auto other = paths::simulate_wiener(grids.time, 3);
    const auto v = fd::solve_spde(prob, grids, other);
    const std::vector<double> rho(u.rows(), 1.0);
    CHECK_THROWS_AS(verify::verify_comparison(u, prob, v, prob, rho, 0.0),
                    std::invalid_argument);
  }
  {  // barrier: ic <= 1 with f = 0 stays below 1 when sigma = 0
    auto det = base_problem(1.0, 0.0);
    det.ic = [](double x) { return 0.9 * std::sin(oracles::kPi * x); };
    const auto ud = fd::solve_spde(det, grids, driver);
    const auto barrier = fd::constant_solution(1.0, ud);
    auto prob_bar = base_problem(1.0, 0.0);
    prob_bar.ic = [](double) { return 1.0; };
    prob_bar.bc_lo = [](double) { return 1.0; };
    prob_bar.bc_hi = [](double) { return 1.0; };
    const std::vector<double> rho(ud.rows(), 1.0);
    const auto rep =
        verify::verify_comparison(ud, det, barrier, prob_bar, rho, 0.0);
    CHECK(rep.pass);
    CHECK(rep.max_violation == 0.0);
  }
  {  // hypothesis guard on the exceedance set
    auto pos = base_problem(1.0, 0.0);
    pos.f = [](double, double) { return 1.0; };  // pushes u above 0
    const auto up = fd::solve_spde(pos, grids, driver);
    auto zero_prob = base_problem(1.0, 0.0);
    const auto zero = fd::constant_solution(0.0, up);
    const std::vector<double> rho(up.rows(), 1.0);
    CHECK_THROWS_AS(
        verify::verify_comparison(up, pos, zero, zero_prob, rho, 1e-3),
        std::invalid_argument);
  }
}

TEST_CASE("comparison with constant rho equals sign check of the difference") {
  fd::SolveGrids grids;
  grids.space = fd::SpaceGrid(0.0, 1.0, 32);
  grids.time = TimeGrid(0.05, 256);
  const auto driver = paths::simulate_wiener(grids.time, 21);

  auto prob_u = base_problem(1.0, 0.5);
  prob_u.ic = [](double x) { return std::sin(oracles::kPi * x); };
  auto prob_b = base_problem(1.0, 0.5);
  prob_b.ic = [](double x) { return 0.75 * std::sin(oracles::kPi * x); };

  const auto u = fd::solve_spde(prob_u, grids, driver);
  const auto ubar = fd::solve_spde(prob_b, grids, driver);
  const double rho_val = 2.0;
  const std::vector<double> rho(u.rows(), rho_val);
  const auto rep = verify::verify_comparison(u, prob_u, ubar, prob_b, rho, 0.1);

  // direct max of (u - rho ubar)+ over the grid
  double direct = 0.0;
  for (std::size_t k = 0; k < u.values.size(); ++k)
    direct = std::max(direct, u.values[k] - rho_val * ubar.values[k]);
  direct = std::max(direct, 0.0);
  CHECK(rep.max_violation == doctest::Approx(direct).epsilon(1e-14));
}

TEST_CASE("envelope verifier") {
  const int m = 2;
  const double width = 0.5;
  auto prob_u = base_problem(1.0, 0.0, 2.0);
  prob_u.f = [width](double, double x) {
    if (x <= width || x >= 1.0) return 0.0;
    const double s = (x - width) * (1.0 - x) / 0.0625;
    return 10.0 * s * s;
  };
  auto prob_v = base_problem(1.0, 0.0, width);
  prob_v.bc_hi = [](double) { return 1.0; };

  fd::SolveGrids grids_u;
  grids_u.space = fd::SpaceGrid(0.0, 2.0, 128);
  grids_u.time = TimeGrid(0.1, 1664);
  grids_u.store_every = 8;
  auto grids_v = grids_u;
  grids_v.space = fd::SpaceGrid(0.0, width, 32);

  const auto driver = paths::simulate_wiener(grids_u.time, 77);
  const auto u = fd::solve_spde(prob_u, grids_u, driver);
  const auto v = fd::solve_spde(prob_v, grids_v, driver);

  const auto res = verify::verify_envelope(u, prob_u, v, m, 1e-9);
  CHECK(res.pass_fraction == 1.0);  // deterministic comparison is exact
  CHECK(res.report.pass);

  // mismatched noise rejected
  const auto other = paths::simulate_wiener(grids_u.time, 78);
  const auto v2 = fd::solve_spde(prob_v, grids_v, other);
  CHECK_THROWS_AS(verify::verify_envelope(u, prob_u, v2, m, 1e-9),
                  std::invalid_argument);

  // data overlapping the strip rejected
  auto bad = prob_u;
  bad.f = [](double, double x) { return x < 0.4 ? -1.0 : 0.0; };
  const auto ub = fd::solve_spde(bad, grids_u, driver);
  CHECK_THROWS_AS(verify::verify_envelope(ub, bad, v, m, 1e-9),
                  std::invalid_argument);
}

TEST_CASE("assumption checker on reference coefficient sets") {
  using verify::CoefficientFields;

  {  // 2-D identity diffusion, no transport: parabolicity for any K1
    CoefficientFields cf;
    cf.dim = 2;
    cf.noise_dim = 1;
    cf.shape = {5, 5};
    cf.spacing = {0.25, 0.25};
    const std::size_t n = cf.nodes();
    cf.a.assign(n * 4, 0.0);
    for (std::size_t node = 0; node < n; ++node) {
      cf.a[node * 4 + 0] = 1.0;
      cf.a[node * 4 + 3] = 1.0;
    }
    cf.b.assign(n * 2, 0.0);
    cf.a1.assign(n * 2, 0.0);
    cf.c.assign(n, 0.0);
    cf.sigma.assign(n * 2, 0.0);
    cf.nu.assign(n, 0.0);
    cf.xi.assign(n * 2, 0.0);
    cf.K1 = 1e-6;
    cf.K2 = 0.0;
    const auto rep = verify::check_assumptions(cf, {{1.0, 0.0}, {0.3, -0.7}});
    CHECK(rep.pass);
  }

  {  // 1-D: a = 1, sigma = 1.2 leaves 2a - alpha = 0.56 > 0
    CoefficientFields cf;
    cf.dim = 1;
    cf.noise_dim = 1;
    cf.shape = {9};
    cf.spacing = {0.125};
    const std::size_t n = cf.nodes();
    cf.a.assign(n, 1.0);
    cf.b.assign(n, 0.0);
    cf.a1.assign(n, 0.0);
    cf.c.assign(n, 0.0);
    cf.sigma.assign(n, 1.2);
    cf.nu.assign(n, 0.0);
    cf.xi.assign(n, 0.0);
    cf.K1 = 1.0;
    cf.K2 = 0.5;
    const auto rep = verify::check_assumptions(cf, {{1.0}});
    CHECK(rep.pass);
    // worst margin across both checks: max(-K1*0.56, -K2) = -0.5
    CHECK(rep.max_violation <= doctest::Approx(-0.5));
  }

  {  // eta linear with slope s: divergence bound reads s <= K2
    auto make = [](double slope, double K2) {
      CoefficientFields cf;
      cf.dim = 1;
      cf.noise_dim = 1;
      cf.shape = {9};
      cf.spacing = {0.125};
      const std::size_t n = cf.nodes();
      cf.a.assign(n, 1.0);
      cf.b.assign(n, 0.0);
      cf.a1.assign(n, 0.0);
      for (std::size_t j = 0; j < n; ++j)
        cf.a1[j] = slope * (0.125 * static_cast<double>(j));
      cf.c.assign(n, 0.0);
      cf.sigma.assign(n, 0.0);
      cf.nu.assign(n, 0.0);
      cf.xi.assign(n, 0.0);
      cf.K1 = 1.0;
      cf.K2 = K2;
      return cf;
    };
    CHECK_FALSE(verify::check_assumptions(make(2.0, 1.0), {{1.0}}).pass);
    CHECK(verify::check_assumptions(make(2.0, 3.0), {{1.0}}).pass);
  }

  {  // relabeling sigma columns leaves the verdict invariant
    CoefficientFields cf;
    cf.dim = 1;
    cf.noise_dim = 2;
    cf.shape = {7};
    cf.spacing = {0.2};
    const std::size_t n = cf.nodes();
    cf.a.assign(n, 1.0);
    cf.b.assign(n, 0.1);
    cf.a1.assign(n, 0.0);
    cf.c.assign(n, 0.05);
    cf.sigma.resize(n * 2);
    cf.nu = {};
    cf.nu.assign(n * 2, 0.2);
    cf.xi.assign(n, 0.3);
    for (std::size_t j = 0; j < n; ++j) {
      cf.sigma[j * 2 + 0] = 0.7;
      cf.sigma[j * 2 + 1] = -0.4;
    }
    cf.K1 = 2.0;
    cf.K2 = 1.0;
    const auto rep1 = verify::check_assumptions(cf, {{1.0}, {-2.0}});

    auto swapped = cf;
    for (std::size_t j = 0; j < n; ++j) {
      std::swap(swapped.sigma[j * 2 + 0], swapped.sigma[j * 2 + 1]);
      std::swap(swapped.nu[j * 2 + 0], swapped.nu[j * 2 + 1]);
    }
    const auto rep2 = verify::check_assumptions(swapped, {{1.0}, {-2.0}});
    CHECK(rep1.pass == rep2.pass);
    CHECK(rep1.max_violation == doctest::Approx(rep2.max_violation));
  }

  {  // dimension mismatch rejected
    CoefficientFields cf;
    cf.dim = 2;
    cf.noise_dim = 1;
    cf.shape = {4, 4};
    cf.spacing = {0.1, 0.1};
    CHECK_THROWS_AS(verify::check_assumptions(cf, {{1.0, 0.0}}),
                    std::invalid_argument);
  }
}
