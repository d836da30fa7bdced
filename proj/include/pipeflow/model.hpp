#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "errors.hpp"

namespace pipeflow {

using Index = Eigen::Index;

template <typename Scalar> using ArrayX = Eigen::Array<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar> using ArrayXX = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Isentropic gas in a pipe of length `length`, pressure law p = rho^gamma
/// (A = 1), friction exponent `alpha`, boundary forcing period `period`.
template <typename Scalar = double> struct GasParams
{
  Scalar gamma{2};
  Scalar alpha{1};
  Scalar rho_bar{1};
  Scalar length{1};
  Scalar period{1};

  /// Baseline sound speed sqrt(gamma) * rho_bar^((gamma - 1) / 2).
  Scalar c_bar() const { return std::sqrt(gamma) * std::pow(rho_bar, (gamma - 1) / 2); }
  Scalar m_bar() const { return -c_bar() / (gamma - 1); }
  Scalar n_bar() const { return c_bar() / (gamma - 1); }
};

template <typename Scalar> void validate(GasParams<Scalar> const &p)
{
  if (!(p.gamma > 1)) { throw DomainError("gamma must exceed 1"); }
  if (!(p.alpha > 0)) { throw DomainError("alpha must be positive"); }
  if (!(p.rho_bar > 0)) { throw DomainError("rho_bar must be positive"); }
  if (!(p.length > 0)) { throw DomainError("pipe length L must be positive"); }
  if (!(p.period > 0)) { throw DomainError("period P must be positive"); }
}

template <typename Scalar = double> struct PhysState
{
  Scalar rho;
  Scalar u;
};

template <typename Scalar = double> struct RiemannState
{
  Scalar m;
  Scalar n;
};

/// Deviation of (m, n) from the baseline (m_bar, n_bar).
template <typename Scalar = double> struct Perturbation
{
  Scalar phi1;
  Scalar phi2;
};

template <typename Scalar = double> struct EigenSpeeds
{
  Scalar lambda1;
  Scalar lambda2;
  Scalar nu1;
  Scalar nu2;
};

template <typename Scalar> Scalar sound_speed(Scalar rho, GasParams<Scalar> const &p)
{
  return std::sqrt(p.gamma) * std::pow(rho, (p.gamma - 1) / 2);
}

template <typename Scalar> RiemannState<Scalar> to_riemann(PhysState<Scalar> const &s, GasParams<Scalar> const &p)
{
  if (!(s.rho > 0)) { throw DomainError("density must be positive, got " + std::to_string(double(s.rho))); }
  Scalar const w = sound_speed(s.rho, p) / (p.gamma - 1);
  return {(s.u - 2 * w) / 2, (s.u + 2 * w) / 2};
}

template <typename Scalar> PhysState<Scalar> from_riemann(RiemannState<Scalar> const &r, GasParams<Scalar> const &p)
{
  if (!(r.n > r.m)) { throw DomainError("n <= m: vacuum or non-physical Riemann state"); }
  Scalar const c = (p.gamma - 1) * (r.n - r.m) / 2;
  return {std::pow(c * c / p.gamma, 1 / (p.gamma - 1)), r.m + r.n};
}

template <typename Scalar> RiemannState<Scalar> to_state(Perturbation<Scalar> const &phi, GasParams<Scalar> const &p)
{
  return {phi.phi1 + p.m_bar(), phi.phi2 + p.n_bar()};
}

template <typename Scalar> Perturbation<Scalar> to_perturbation(RiemannState<Scalar> const &r, GasParams<Scalar> const &p)
{
  return {r.m - p.m_bar(), r.n - p.n_bar()};
}

// Both characteristic speeds are linear in (m, n).
template <typename Scalar> Scalar lambda1(Scalar m, Scalar n, GasParams<Scalar> const &p)
{
  return (p.gamma + 1) * m / 2 + (3 - p.gamma) * n / 2;
}

template <typename Scalar> Scalar lambda2(Scalar m, Scalar n, GasParams<Scalar> const &p)
{
  return (3 - p.gamma) * m / 2 + (p.gamma + 1) * n / 2;
}

template <typename Scalar> EigenSpeeds<Scalar> eigenvalues(RiemannState<Scalar> const &r, GasParams<Scalar> const &p)
{
  Scalar const l1 = lambda1(r.m, r.n, p);
  Scalar const l2 = lambda2(r.m, r.n, p);
  if (!(r.n > r.m)) { throw SonicError("sonic degeneracy: c = 0 (n <= m), reciprocal speeds undefined"); }
  if (l1 == 0 || l2 == 0) { throw SonicError("sonic degeneracy: a characteristic speed is zero"); }
  return {l1, l2, 1 / l1, 1 / l2};
}

/// sign(s) |s|^(alpha + 1), exactly 0 at s = 0.
template <typename Scalar> Scalar signed_power(Scalar s, Scalar alpha)
{
  if (s == 0) { return Scalar(0); }
  return std::copysign(std::pow(std::abs(s), alpha + 1), s);
}

/// Friction source of the perturbation system: (beta / 2) |s|^alpha s with s = phi1 + phi2.
template <typename Scalar> Scalar source_term(Scalar phi1, Scalar phi2, Scalar beta, GasParams<Scalar> const &p)
{
  return beta / 2 * signed_power(phi1 + phi2, p.alpha);
}

template <typename Scalar = double> struct SubsonicReport
{
  Scalar min_neg_lambda1 = std::numeric_limits<Scalar>::infinity(); // min over nodes of -lambda1
  Scalar min_lambda2 = std::numeric_limits<Scalar>::infinity();
  Scalar nu_max = 0;
  bool sonic = false; // some node has n <= m
  Index nodes = 0;

  bool pass() const { return !sonic && min_neg_lambda1 > 0 && min_lambda2 > 0; }
};

/// Sign condition lambda1 < 0 < lambda2 over every node of a perturbation field.
template <typename D1, typename D2>
auto subsonic_check(Eigen::ArrayBase<D1> const &phi1, Eigen::ArrayBase<D2> const &phi2,
                    GasParams<typename D1::Scalar> const &p)
{
  using Scalar = typename D1::Scalar;
  SubsonicReport<Scalar> rep;
  Scalar const mb = p.m_bar();
  Scalar const nb = p.n_bar();
  for (Index c = 0; c < phi1.cols(); ++c) {
    for (Index r = 0; r < phi1.rows(); ++r) {
      Scalar const m = phi1(r, c) + mb;
      Scalar const n = phi2(r, c) + nb;
      Scalar const l1 = lambda1(m, n, p);
      Scalar const l2 = lambda2(m, n, p);
      if (!(n > m)) { rep.sonic = true; }
      if (!std::isfinite(l1) || !std::isfinite(l2)) {
        rep.sonic = true;
        continue;
      }
      rep.min_neg_lambda1 = std::min(rep.min_neg_lambda1, -l1);
      rep.min_lambda2 = std::min(rep.min_lambda2, l2);
      if (l1 != 0) { rep.nu_max = std::max(rep.nu_max, std::abs(1 / l1)); }
      if (l2 != 0) { rep.nu_max = std::max(rep.nu_max, std::abs(1 / l2)); }
      ++rep.nodes;
    }
  }
  if (!rep.pass()) { rep.nu_max = std::numeric_limits<Scalar>::infinity(); }
  return rep;
}

} // namespace pipeflow
