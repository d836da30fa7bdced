#include <doctest.h>

#include <cmath>

#include "pipeflow/stability.hpp"

using namespace pipeflow;

namespace {

GasParams<double> const unit{2, 1, 1, 1, 1};

StabilityConfig<double> config(double eps, Index n)
{
  StabilityConfig<double> cfg;
  cfg.gas = unit;
  cfg.friction = FrictionSpec<double>::constant(0.5);
  cfg.boundary = BoundaryData<double>::from_shape({0, {}, {1.0}}, {0, {1.0}, {}}, eps);
  cfg.grid = {n, n};
  cfg.amplitude = eps / 2;
  return cfg;
}

} // namespace

TEST_CASE("fit_decay")
{
  auto const exact = fit_decay(std::vector<double>{0.01, 0.005, 0.0025, 0.00125});
  CHECK(exact.xi_hat == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(exact.points == 4);
  REQUIRE(exact.ratios.size() == 3);
  CHECK(exact.ratios[1] == doctest::Approx(0.5));

  CHECK(fit_decay(std::vector<double>{0.01, 0.01, 0.01}).xi_hat == doctest::Approx(1.0).epsilon(1e-14));

  std::vector<double> const floor_only{1e-9, 1e-9, 1e-9, 1e-9};
  CHECK_THROWS_AS(fit_decay(floor_only, 1e-9), InsufficientDataError);

  // entries at or below the floor end the usable run
  auto const cut = fit_decay(std::vector<double>{1.0, 0.1, 0.01, 1e-12, 1e-12}, 1e-10);
  CHECK(cut.points == 3);
  CHECK(cut.xi_hat == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("monotone_fraction")
{
  CHECK(monotone_fraction(std::vector<double>{4, 3, 2, 1}) == 1.0);
  CHECK(monotone_fraction(std::vector<double>{1, 1.04, 1.0}) == 1.0);
  CHECK(monotone_fraction(std::vector<double>{1, 2, 1}) == 0.5);
  // below the floor, jitter does not count as growth
  CHECK(monotone_fraction(std::vector<double>{1, 1e-15, 3e-15, 2e-15}, 1e-14) == 1.0);
}

TEST_CASE("window distances")
{
  auto const cfg = config(0.01, 48);
  auto const sol = solve_periodic(cfg.boundary, cfg.friction, cfg.gas, cfg.grid, cfg.solver);
  double const T0 = sol.report.T0;
  int const K = 3;

  Trajectory<double> shifted;
  for (int k = 0; k <= K; ++k) {
    auto [a, b] = profile_at(sol.field, k * T0);
    shifted.snapshots.push_back({k * T0, a + 0.01, b + 0.01});
  }
  for (double d : window_distances(shifted, sol.field, T0, K)) { CHECK(d == doctest::Approx(0.01).epsilon(1e-12)); }

  auto const [a, b] = profile_at(sol.field, 0.0);
  std::vector<double> times;
  for (int k = 0; k <= K; ++k) { times.push_back(k * T0); }
  auto const traj = run_ibvp(a, b, cfg.boundary, cfg.mode, cfg.friction, unit, K * T0, times);
  auto const closure = closure_residual(sol.field, cfg.boundary, cfg.friction, unit, 0.9);
  for (double d : window_distances(traj, sol.field, T0, K)) { CHECK(d <= 10 * closure); }

  CHECK_THROWS_AS(window_distances(traj, sol.field, T0, K + 1), PreconditionError);
}

TEST_CASE("perturbed run decays")
{
  auto const cfg = config(0.01, 64);
  auto const rep = run_stability_experiment(cfg);
  CHECK(rep.pass);
  CHECK_FALSE(rep.trivial);
  REQUIRE(rep.xi_hat);
  CHECK(*rep.xi_hat > 0);
  CHECK(*rep.xi_hat < 1);
  CHECK(rep.monotone_fraction >= 0.8);
  CHECK(rep.distances.size() == 9);
  CHECK(rep.distances.front() == doctest::Approx(cfg.amplitude).epsilon(0.01));
  for (double d : rep.distances) { CHECK(d >= 0); }
  CHECK(rep.raw_distances.size() == rep.distances.size());
  CHECK(rep.raw_floor == doctest::Approx(10 * rep.closure_residual));
}

TEST_CASE("zero amplitude is a trivial pass")
{
  auto cfg = config(0.01, 32);
  cfg.amplitude = 0;
  auto const rep = run_stability_experiment(cfg);
  CHECK(rep.trivial);
  CHECK(rep.pass);
  CHECK_FALSE(rep.xi_hat);
}

TEST_CASE("a perturbation that breaks subsonicity is reported")
{
  auto cfg = config(0.01, 32);
  cfg.amplitude = 2.0;
  // zero-coefficient closures skip the first-order corner check, which this bump fails
  cfg.mode = BoundaryMode<double>::reflective(0, 0);
  auto const rep = run_stability_experiment(cfg);
  CHECK(rep.regime_failure);
  CHECK_FALSE(rep.pass);
  CHECK_FALSE(rep.note.empty());
}

TEST_CASE("fitted ratio shrinks with the data amplitude")
{
  std::vector<double> xi;
  for (double eps : {1e-2, 5e-3, 2.5e-3}) {
    auto const rep = run_stability_experiment(config(eps, 64));
    REQUIRE(rep.xi_hat);
    xi.push_back(*rep.xi_hat);
  }
  for (std::size_t i = 1; i < xi.size(); ++i) { CHECK(xi[i] <= 1.1 * xi[i - 1]); }
}

TEST_CASE("two perturbed runs approach each other")
{
  auto const cfg = config(0.01, 64);
  auto const sol = solve_periodic(cfg.boundary, cfg.friction, cfg.gas, cfg.grid, cfg.solver);
  auto const rep = run_uniqueness_experiment(cfg, sol, 0.005, -0.0033);
  REQUIRE(rep.xi_hat);
  CHECK(*rep.xi_hat < 1);
  CHECK(rep.distances.back() < rep.distances.front());
}
