#include <doctest.h>

#include <cmath>

#include "pipeflow/periodic_solver.hpp"
#include "pipeflow/verification.hpp"

using namespace pipeflow;

namespace {

GasParams<double> const unit{2, 1, 1, 1, 1};

fvm::ConsCells<double> uniform_cells(Index n, double rho, double u)
{
  return {0, ArrayX<double>::Constant(n, rho), ArrayX<double>::Constant(n, rho * u)};
}

// perturbation data matching a uniform (rho = 1, u) state for gamma = 2
BoundaryData<double> matching(double u) { return {{u / 2, {}, {}}, {u / 2, {}, {}}, 0}; }

} // namespace

TEST_CASE("conservative_flux")
{
  auto const [a0, a1] = fvm::conservative_flux(1.0, 0.0, unit);
  CHECK(a0 == 0);
  CHECK(a1 == 1);
  auto const [b0, b1] = fvm::conservative_flux(1.0, 1.0, unit);
  CHECK(b0 == 1);
  CHECK(b1 == 2);
  CHECK(fvm::conservative_flux(3.7, 0.0, unit).first == 0);
  CHECK_THROWS_AS(fvm::conservative_flux(0.0, 1.0, unit), DomainError);
}

TEST_CASE("rest state is steady for any friction")
{
  auto c = uniform_cells(40, 1, 0);
  auto const beta = FrictionSpec<double>::series({{0, 0, 0.8, 0}, {2, 1, 0.3, -0.1}}, 10);
  for (int i = 0; i < 200; ++i) {
    c = fvm::rusanov_step(c, fvm::stable_dt(c, unit, 0.9), BoundaryData<double>::zero(), beta, unit);
  }
  CHECK((c.rho - 1).abs().maxCoeff() <= 1e-14);
  CHECK(c.mom.abs().maxCoeff() <= 1e-14);
}

TEST_CASE("uniform moving state: friction only acts on momentum")
{
  double const u0 = 0.1;
  double const b = 0.5;
  auto const c = uniform_cells(32, 1, u0);
  double const dt = fvm::stable_dt(c, unit, 0.9);
  auto const n = fvm::rusanov_step(c, dt, matching(u0), FrictionSpec<double>::constant(b), unit);
  CHECK((n.rho - 1).abs().maxCoeff() <= 1e-14);
  for (Index i = 0; i < 32; ++i) { CHECK(n.mom(i) - u0 == doctest::Approx(dt * b * std::abs(u0) * u0).epsilon(1e-9)); }
}

TEST_CASE("interior mass is conserved")
{
  Index const n = 200;
  auto c = fvm::cells_from_perturbation(n, unit, [](double x) {
    double const bump = std::abs(x - 0.5) < 0.1 ? 0.01 * std::pow(std::cos(5 * 3.141592653589793 * (x - 0.5)), 2) : 0;
    return std::pair<double, double>{-bump, bump}; // u = phi1 + phi2 = 0
  });
  double const h = 1.0 / double(n);
  double mass = c.rho.sum() * h;
  for (int i = 0; i < 40; ++i) {
    c = fvm::rusanov_step(c, fvm::stable_dt(c, unit, 0.9), BoundaryData<double>::zero(), FrictionSpec<double>::constant(0),
                          unit);
    double const now = c.rho.sum() * h;
    CHECK(std::abs(now - mass) <= 1e-12);
    mass = now;
  }
}

TEST_CASE("compare_fields")
{
  Index const nx = 33;
  ArrayX<double> const a = ArrayX<double>::LinSpaced(nx, 0.0, 0.01);
  ArrayX<double> const b = ArrayX<double>::LinSpaced(nx, 0.005, -0.005);
  auto const cells = fvm::cells_from_perturbation(64, unit, [](double x) {
    return std::pair<double, double>{0.01 * x, 0.005 - 0.01 * x};
  });
  auto const same = fvm::compare_fields(a, b, cells, unit);
  CHECK(same.linf() <= 1e-15);
  CHECK(same.l2_1 <= 1e-15);

  double const delta = 1e-3;
  ArrayX<double> const shifted = a + delta;
  auto const d = fvm::compare_fields(shifted, b, cells, unit);
  CHECK(d.linf1 == doctest::Approx(delta).epsilon(1e-10));
  CHECK(d.linf2 <= 1e-15);
  CHECK(d.linf() == doctest::Approx(delta).epsilon(1e-10));
}

TEST_CASE("CFL and vacuum guards")
{
  auto const c = uniform_cells(16, 1, 0);
  double const dt = fvm::stable_dt(c, unit, 0.9);
  CHECK_THROWS_AS(fvm::rusanov_step(c, 2 * dt, BoundaryData<double>::zero(), FrictionSpec<double>::constant(0), unit),
                  PreconditionError);
  auto bad = c;
  bad.rho(3) = -1;
  CHECK_THROWS_AS(fvm::rusanov_step(bad, dt, BoundaryData<double>::zero(), FrictionSpec<double>::constant(0), unit),
                  RegimeError);
}

TEST_CASE("oracle agrees with the periodic solution and improves under refinement")
{
  auto const bd = BoundaryData<double>::from_shape({0, {}, {1.0}}, {0, {1.0}, {}}, 0.01);
  auto const beta = FrictionSpec<double>::constant(0.5);
  std::vector<double> err;
  for (Index n : {32, 64}) {
    auto const sol = solve_periodic(bd, beta, unit, {n, n});
    err.push_back(oracle_discrepancy(sol.field, bd, beta, unit, n, 6 * sol.report.T0).linf());
  }
  CHECK(err[0] < 0.1 * 0.01);
  CHECK(observed_orders(err)[0] >= 0.8);
}
