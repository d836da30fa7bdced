#include <doctest.h>

#include <cmath>
#include <random>

#include "pipeflow/field.hpp"
#include "pipeflow/model.hpp"

using namespace pipeflow;

namespace {

GasParams<double> gas(double gamma) { return {gamma, 1, 1, 1, 1}; }

} // namespace

TEST_CASE("to_riemann hand values")
{
  auto const r2 = to_riemann(PhysState<double>{1, 0}, gas(2));
  CHECK(r2.m == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-14));
  CHECK(r2.n == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  auto const r3 = to_riemann(PhysState<double>{1, 0}, gas(3));
  CHECK(r3.m == doctest::Approx(-std::sqrt(3.0) / 2).epsilon(1e-14));
  CHECK(r3.n == doctest::Approx(std::sqrt(3.0) / 2).epsilon(1e-14));
  auto const r = to_riemann(PhysState<double>{0.37, 0}, gas(1.4));
  CHECK(r.m == -r.n);
  CHECK_THROWS_AS(to_riemann(PhysState<double>{0, 1}, gas(2)), DomainError);
  CHECK_THROWS_AS(to_riemann(PhysState<double>{-1, 0}, gas(2)), DomainError);
}

TEST_CASE("from_riemann hand values and vacuum limit")
{
  double const s2 = std::sqrt(2.0);
  auto const a = from_riemann(RiemannState<double>{-s2, s2}, gas(2));
  CHECK(a.rho == doctest::Approx(1).epsilon(1e-14));
  CHECK(std::abs(a.u) < 1e-15);
  auto const b = from_riemann(RiemannState<double>{0, s2}, gas(2));
  CHECK(b.u == doctest::Approx(s2).epsilon(1e-14));
  CHECK(b.rho == doctest::Approx(0.25).epsilon(1e-14));
  double prev = 1e300;
  for (double d = 1.0; d > 1e-6; d /= 10) {
    double const rho = from_riemann(RiemannState<double>{1 - d, 1}, gas(2)).rho;
    CHECK(rho > 0);
    CHECK(rho < prev);
    prev = rho;
  }
  CHECK_THROWS_AS(from_riemann(RiemannState<double>{1, 1}, gas(2)), DomainError);
}

TEST_CASE("round trip and eigen consistency on random subsonic states")
{
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> g(1.05, 3.5), rho(0.05, 5), mach(-0.95, 0.95);
  for (int i = 0; i < 10000; ++i) {
    auto const p = gas(g(rng));
    PhysState<double> s{rho(rng), 0};
    double const c = sound_speed(s.rho, p);
    s.u = mach(rng) * c;
    auto const back = from_riemann(to_riemann(s, p), p);
    REQUIRE(std::abs(back.rho - s.rho) <= 1e-12 * s.rho);
    REQUIRE(std::abs(back.u - s.u) <= 1e-12 * std::max(std::abs(s.u), c));
    auto const e = eigenvalues(to_riemann(s, p), p);
    REQUIRE(std::abs(e.lambda1 - (s.u - c)) <= 1e-12 * std::max(1.0, c));
    REQUIRE(std::abs(e.lambda2 - (s.u + c)) <= 1e-12 * std::max(1.0, c));
  }
}

TEST_CASE("eigenvalues hand values")
{
  double const s2 = std::sqrt(2.0);
  auto const e = eigenvalues(RiemannState<double>{-s2, s2}, gas(2));
  CHECK(e.lambda1 == doctest::Approx(-s2).epsilon(1e-14));
  CHECK(e.lambda2 == doctest::Approx(s2).epsilon(1e-14));
  CHECK(e.nu1 == doctest::Approx(-1 / s2).epsilon(1e-14));
  CHECK(e.nu2 == doctest::Approx(1 / s2).epsilon(1e-14));
  auto const f = eigenvalues(RiemannState<double>{-0.5, 0.7}, gas(3));
  CHECK(f.lambda1 == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(f.lambda2 == doctest::Approx(1.4).epsilon(1e-14));
  CHECK(lambda1(0.3, 0.3, gas(2)) == doctest::Approx(0.6));
  CHECK(lambda2(0.3, 0.3, gas(2)) == doctest::Approx(0.6));
  CHECK_THROWS_AS(eigenvalues(RiemannState<double>{0.3, 0.3}, gas(2)), SonicError);
}

TEST_CASE("gamma = 3 decouples the speeds")
{
  auto const p = gas(3);
  double const h = 1e-6;
  for (double m : {-0.9, -0.3, 0.1}) {
    for (double n : {0.5, 0.8, 1.3}) {
      double const d1 = (lambda1(m, n + h, p) - lambda1(m, n - h, p)) / (2 * h);
      double const d2 = (lambda2(m + h, n, p) - lambda2(m - h, n, p)) / (2 * h);
      CHECK(std::abs(d1) <= 1e-10);
      CHECK(std::abs(d2) <= 1e-10);
    }
  }
}

TEST_CASE("source term")
{
  auto p = gas(2);
  CHECK(source_term(0.1, -0.1, 3.0, p) == 0);
  CHECK(source_term(0.1, 0.1, 1.0, p) == doctest::Approx(0.02).epsilon(1e-14));
  p.alpha = 2;
  CHECK(source_term(0.1, 0.0, 2.0, p) == doctest::Approx(0.001).epsilon(1e-13));
  for (double alpha : {0.3, 1.0, 1.7}) {
    p.alpha = alpha;
    for (double a : {-0.2, 0.013, 0.5}) {
      for (double b : {-0.07, 0.0, 0.31}) {
        CHECK(source_term(a, b, 0.8, p) == -source_term(-a, -b, 0.8, p));
      }
    }
    CHECK(source_term(0.0, 0.0, 1.0, p) == 0);
  }
}

TEST_CASE("subsonic_check")
{
  auto const p = gas(2);
  PeriodicField<double> f(16, 16, 1, 1);
  auto const ok = subsonic_check(f, p);
  CHECK(ok.pass());
  CHECK(ok.nu_max == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(ok.nu_max <= 1);

  f.phi1.setConstant(10);
  f.phi2.setConstant(10);
  CHECK_FALSE(subsonic_check(f, p).pass());

  PeriodicField<double> g(16, 16, 1, 1);
  // m = n at one node: phi1 - phi2 = n_bar - m_bar
  g.phi1(3, 4) = p.n_bar() - p.m_bar();
  auto const bad = subsonic_check(g, p);
  CHECK_FALSE(bad.pass());
  CHECK(bad.sonic);
}

TEST_CASE("gas parameter validation")
{
  CHECK_THROWS_AS(validate(GasParams<double>{1.0, 1, 1, 1, 1}), DomainError);
  CHECK_THROWS_AS(validate(GasParams<double>{2, 0, 1, 1, 1}), DomainError);
  CHECK_THROWS_AS(validate(GasParams<double>{2, 1, -1, 1, 1}), DomainError);
  CHECK_NOTHROW(validate(GasParams<double>{2, 1, 1, 1, 1}));
  auto const p = gas(2);
  CHECK(p.c_bar() == doctest::Approx(std::sqrt(2.0)));
  CHECK(p.n_bar() - p.m_bar() == doctest::Approx(2 * p.c_bar() / (p.gamma - 1)));
}
