#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pipeflow/ibvp.hpp"
#include "pipeflow/periodic_solver.hpp"
#include "pipeflow/stability.hpp"

using namespace pipeflow;

namespace {

GasParams<double> const unit{2, 1, 1, 1, 1};

BoundaryData<double> sine_cosine(double eps)
{
  return BoundaryData<double>::from_shape({0, {}, {1.0}}, {0, {1.0}, {}}, eps);
}

BoundaryData<double> constant_data(double a, double b) { return {{a, {}, {}}, {b, {}, {}}, 0}; }

IbvpState<double> uniform(Index nx, double a, double b)
{
  return {0, ArrayX<double>::Constant(nx, a), ArrayX<double>::Constant(nx, b)};
}

auto const dirichlet = BoundaryMode<double>::dirichlet();

} // namespace

TEST_CASE("zero state is steady for 1e5 steps")
{
  auto s = uniform(32, 0, 0);
  auto const beta = FrictionSpec<double>::constant(0.7);
  double const dt = stable_dt(s, unit, 0.9, 1.0);
  for (int i = 0; i < 100000; ++i) { s = step_ibvp(s, dt, BoundaryData<double>::zero(), dirichlet, beta, unit); }
  CHECK(s.phi1.abs().maxCoeff() <= 1e-13);
  CHECK(s.phi2.abs().maxCoeff() <= 1e-13);
}

TEST_CASE("uniform state without friction is exact")
{
  auto const s = uniform(24, 0.01, 0.01);
  double const dt = stable_dt(s, unit, 0.9, 1.0);
  auto const n = step_ibvp(s, dt, constant_data(0.01, 0.01), dirichlet, FrictionSpec<double>::constant(0), unit);
  CHECK((n.phi1 == s.phi1).all());
  CHECK((n.phi2 == s.phi2).all());
  CHECK(n.t == dt);
}

TEST_CASE("source-only update on a uniform state")
{
  auto const s = uniform(24, 0.01, 0.01);
  double const dt = 1e-3;
  auto const n = step_ibvp(s, dt, constant_data(0.01, 0.01), dirichlet, FrictionSpec<double>::constant(1), unit);
  for (Index k = 1; k < 23; ++k) {
    CHECK(n.phi1(k) - 0.01 == doctest::Approx(dt * 0.0002).epsilon(1e-3));
    CHECK(n.phi2(k) - 0.01 == doctest::Approx(dt * 0.0002).epsilon(1e-3));
  }
}

TEST_CASE("CFL guard")
{
  auto const s = uniform(32, 0, 0);
  double const dt = stable_dt(s, unit, 0.9, 1.0);
  auto const bd = BoundaryData<double>::zero();
  auto const beta = FrictionSpec<double>::constant(0.5);
  CHECK_NOTHROW(step_ibvp(s, dt, bd, dirichlet, beta, unit));
  CHECK_THROWS_AS(step_ibvp(s, dt * 1.2, bd, dirichlet, beta, unit), PreconditionError);
  CHECK_THROWS_AS(step_ibvp(s, -dt, bd, dirichlet, beta, unit), PreconditionError);
}

TEST_CASE("disturbances travel only along their own family")
{
  auto const beta = FrictionSpec<double>::constant(0);
  Index const nx = 101;
  // 0.01 (1 - cos 2 pi t): zero value and slope at t = 0, so the rest state is compatible
  BoundaryData<double> left{{0, {}, {}}, {0.01, {-0.01}, {}}, 0.01};
  BoundaryData<double> right{{0.01, {-0.01}, {}}, {0, {}, {}}, 0.01};
  std::vector<double> const at{0.2};
  ArrayX<double> const rest = ArrayX<double>::Zero(nx);

  auto const a = run_ibvp(rest, rest, left, dirichlet, beta, unit, 0.2, at);
  auto const &sa = a.snapshots.back();
  CHECK(sa.phi1.abs().maxCoeff() <= 1e-13);
  CHECK(sa.phi2.abs().maxCoeff() > 1e-4);
  CHECK(sa.phi2.tail(40).abs().maxCoeff() == 0);

  auto const b = run_ibvp(rest, rest, right, dirichlet, beta, unit, 0.2, at);
  auto const &sb = b.snapshots.back();
  CHECK(sb.phi2.abs().maxCoeff() <= 1e-13);
  CHECK(sb.phi1.abs().maxCoeff() > 1e-4);
  CHECK(sb.phi1.head(40).abs().maxCoeff() == 0);
}

TEST_CASE("reflective mode with zero coefficients equals dirichlet bit for bit")
{
  auto const bd = sine_cosine(0.01);
  auto const beta = FrictionSpec<double>::constant(0.5);
  auto const sol = solve_periodic(bd, beta, unit, {32, 32});
  auto const [a, b] = profile_at(sol.field, 0.0);
  auto const [p, q] = make_compatible_perturbation(a, b, 0.005, unit);
  auto const times = snapshot_cadence(2.0, 0.25);
  auto const x = run_ibvp(p, q, bd, dirichlet, beta, unit, 2.0, times);
  auto const y = run_ibvp(p, q, bd, BoundaryMode<double>::reflective(0, 0), beta, unit, 2.0, times);
  REQUIRE(x.snapshots.size() == y.snapshots.size());
  for (std::size_t i = 0; i < x.snapshots.size(); ++i) {
    CHECK((x.snapshots[i].phi1 == y.snapshots[i].phi1).all());
    CHECK((x.snapshots[i].phi2 == y.snapshots[i].phi2).all());
  }
  CHECK_THROWS_AS(validate(BoundaryMode<double>::reflective(1.5, 0)), DomainError);
}

TEST_CASE("reflective closures set the inflow values")
{
  auto const s = uniform(16, 0.004, -0.002);
  auto const bd = constant_data(0.001, 0.003);
  double const dt = stable_dt(s, unit, 0.9, 1.0);
  auto const mode = BoundaryMode<double>::reflective(0.5, -0.25);
  auto const n = step_ibvp(s, dt, bd, mode, FrictionSpec<double>::constant(0), unit);
  CHECK(n.phi2(0) == doctest::Approx(0.003 + 0.5 * n.phi1(0)).epsilon(1e-14));
  CHECK(n.phi1(15) == doctest::Approx(0.001 - 0.25 * n.phi2(15)).epsilon(1e-14));
}

TEST_CASE("check_compatibility")
{
  auto const beta = FrictionSpec<double>::constant(0.5);
  auto const z = check_compatibility(ArrayX<double>::Zero(16).eval(), ArrayX<double>::Zero(16).eval(),
                                     BoundaryData<double>::zero(), beta, unit, dirichlet);
  CHECK(z.order0_left == 0);
  CHECK(z.order0_right == 0);
  CHECK(z.order1_left == 0);
  CHECK(z.order1_right == 0);
  CHECK(z.pass());

  auto const bd = sine_cosine(0.01);
  auto const sol = solve_periodic(bd, beta, unit, {64, 64});
  auto const [a, b] = profile_at(sol.field, 0.0);
  CHECK(check_compatibility(a, b, bd, beta, unit, dirichlet).pass());

  BoundaryData<double> kick{{0, {}, {}}, {0.01, {}, {}}, 0.01};
  auto const bad = check_compatibility(ArrayX<double>::Zero(16).eval(), ArrayX<double>::Zero(16).eval(), kick, beta,
                                       unit, dirichlet);
  CHECK(bad.order0_left == doctest::Approx(0.01));
  CHECK_FALSE(bad.pass());

  auto const refl = check_compatibility(a, b, bd, beta, unit, BoundaryMode<double>::reflective(0.1, 0.1));
  CHECK_FALSE(refl.order1_checked);
}

TEST_CASE("make_compatible_perturbation")
{
  ArrayX<double> const base = ArrayX<double>::LinSpaced(21, -0.01, 0.02);
  auto const [same1, same2] = make_compatible_perturbation(base, base, 0.0, unit);
  CHECK((same1 == base).all());
  CHECK((same2 == base).all());

  ArrayX<double> const zero = ArrayX<double>::Zero(21);
  auto const [p, q] = make_compatible_perturbation(zero, zero, 0.01, unit);
  CHECK(p(10) == doctest::Approx(0.01).epsilon(1e-14));
  CHECK(q(10) == doctest::Approx(0.01).epsilon(1e-14));
  CHECK(p(0) == 0);
  CHECK(p(20) == 0);
  CHECK(q(0) == 0);
  CHECK(q(20) == 0);

  auto const bd = sine_cosine(0.01);
  auto const beta = FrictionSpec<double>::constant(0.5);
  auto const sol = solve_periodic(bd, beta, unit, {64, 64});
  auto const [a, b] = profile_at(sol.field, 0.0);
  auto const [pa, pb] = make_compatible_perturbation(a, b, 0.005, unit);
  auto const r0 = check_compatibility(a, b, bd, beta, unit, dirichlet);
  auto const r1 = check_compatibility(pa, pb, bd, beta, unit, dirichlet);
  CHECK(std::abs(r1.order0_left - r0.order0_left) <= 1e-12);
  CHECK(std::abs(r1.order0_right - r0.order0_right) <= 1e-12);
  CHECK(r1.pass());
}

TEST_CASE("run_ibvp basics")
{
  auto const beta = FrictionSpec<double>::constant(0.5);
  auto const zero = ArrayX<double>::Zero(32).eval();
  auto const traj = run_ibvp(zero, zero, BoundaryData<double>::zero(), dirichlet, beta, unit, 1.0,
                             snapshot_cadence(1.0, 0.25));
  CHECK(traj.snapshots.size() == 5);
  for (auto const &s : traj.snapshots) {
    CHECK((s.phi1 == 0).all());
    CHECK((s.phi2 == 0).all());
  }
  CHECK(traj.snapshots.back().t == 1.0);
  CHECK(traj.max_c0 == 0);

  BoundaryData<double> kick{{0, {}, {}}, {0.01, {}, {}}, 0.01};
  CHECK_THROWS_AS(run_ibvp(zero, zero, kick, dirichlet, beta, unit, 1.0, {1.0}), PreconditionError);
  CHECK_THROWS_AS(run_ibvp(zero, zero, BoundaryData<double>::zero(), dirichlet, beta, unit, 0.0, {}),
                  PreconditionError);
  CHECK_THROWS_AS(run_ibvp(zero, zero, BoundaryData<double>::zero(), dirichlet, beta, unit, 1.0, {0.5, 0.25}),
                  PreconditionError);

  auto const big = ArrayX<double>::Constant(32, 10).eval();
  CHECK_THROWS_AS(run_ibvp(big, big, BoundaryData<double>::zero(), BoundaryMode<double>::reflective(0, 0), beta, unit,
                           1.0, {1.0}),
                  IbvpRegimeError<double>);
}

TEST_CASE("closure over one period converges at first order")
{
  auto const bd = sine_cosine(0.01);
  auto const beta = FrictionSpec<double>::constant(0.5);
  std::vector<double> res;
  for (Index n : {32, 64, 128}) {
    auto const sol = solve_periodic(bd, beta, unit, {n, n});
    res.push_back(closure_residual(sol.field, bd, beta, unit, 0.9));
    auto const [a, b] = profile_at(sol.field, 0.0);
    auto const traj = run_ibvp(a, b, bd, dirichlet, beta, unit, 1.0, snapshot_cadence(1.0, 0.125));
    for (auto const &s : traj.snapshots) { CHECK(subsonic_check(s.phi1, s.phi2, unit).pass()); }
  }
  CHECK(res[0] < 1e-3);
  for (std::size_t i = 1; i < res.size(); ++i) {
    double const ratio = res[i] / res[i - 1];
    CHECK(ratio >= 0.35);
    CHECK(ratio <= 0.65);
  }
}
