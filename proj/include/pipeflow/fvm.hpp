#pragma once

// First-order finite-volume oracle on the conservative form in (rho, rho u).
// Deliberately independent of the Riemann-invariant code path: only the
// parameter types are shared, all state conversions are written out here.

#include <cmath>
#include <utility>

#include "boundary.hpp"
#include "friction.hpp"
#include "model.hpp"

namespace pipeflow::fvm {

/// Cell averages on cells of width L / n, centres at (i + 1/2) L / n.
template <typename Scalar = double> struct ConsCells
{
  Scalar t{0};
  ArrayX<Scalar> rho;
  ArrayX<Scalar> mom;

  Index size() const { return rho.size(); }
};

template <typename Scalar> Scalar cell_center(Index i, Index n, Scalar length)
{
  return (Scalar(i) + Scalar(0.5)) * length / Scalar(n);
}

template <typename Scalar> std::pair<Scalar, Scalar> conservative_flux(Scalar rho, Scalar u, GasParams<Scalar> const &p)
{
  if (!(rho > 0)) { throw DomainError("conservative_flux: density must be positive"); }
  return {rho * u, rho * u * u + std::pow(rho, p.gamma)};
}

namespace detail {

template <typename Scalar> Scalar sound(Scalar rho, Scalar gamma)
{
  return std::sqrt(gamma * std::pow(rho, gamma - 1));
}

// (rho, u) with left-going invariant m and right-going invariant n.
template <typename Scalar> std::pair<Scalar, Scalar> state_from_invariants(Scalar m, Scalar n, Scalar gamma)
{
  Scalar const c = (gamma - 1) / 2 * (n - m);
  if (!(c > 0)) { throw RegimeError("fvm: ghost state has non-positive sound speed"); }
  return {std::pow(c * c / gamma, 1 / (gamma - 1)), m + n};
}

template <typename Scalar> std::pair<Scalar, Scalar> invariants(Scalar rho, Scalar u, Scalar gamma)
{
  Scalar const w = sound(rho, gamma) / (gamma - 1);
  return {u / 2 - w, u / 2 + w};
}

template <typename Scalar> Scalar baseline_invariant(GasParams<Scalar> const &p)
{
  return sound(p.rho_bar, p.gamma) / (p.gamma - 1);
}

} // namespace detail

/// Cells from a perturbation profile given as a callable x -> (phi1, phi2).
template <typename Scalar, typename Profile>
ConsCells<Scalar> cells_from_perturbation(Index n, GasParams<Scalar> const &p, Profile &&profile)
{
  ConsCells<Scalar> c{0, ArrayX<Scalar>(n), ArrayX<Scalar>(n)};
  Scalar const w = detail::baseline_invariant(p);
  for (Index i = 0; i < n; ++i) {
    auto const [phi1, phi2] = profile(cell_center(i, n, p.length));
    auto const [rho, u] = detail::state_from_invariants(phi1 - w, phi2 + w, p.gamma);
    c.rho(i) = rho;
    c.mom(i) = rho * u;
  }
  return c;
}

template <typename Scalar> Scalar stable_dt(ConsCells<Scalar> const &c, GasParams<Scalar> const &p, Scalar cfl)
{
  Scalar vmax = 0;
  for (Index i = 0; i < c.size(); ++i) {
    Scalar const u = c.mom(i) / c.rho(i);
    vmax = std::max(vmax, std::abs(u) + detail::sound(c.rho(i), p.gamma));
  }
  return cfl * p.length / Scalar(c.size()) / vmax;
}

/// Rusanov fluxes, forward Euler in time, explicit friction beta rho |u|^alpha u
/// on the momentum equation. Ghost cells take the incoming invariant from the
/// boundary data and copy the outgoing one from the adjacent interior cell.
template <typename Scalar>
ConsCells<Scalar> rusanov_step(ConsCells<Scalar> const &c, Scalar dt, BoundaryData<Scalar> const &bd,
                               FrictionSpec<Scalar> const &friction, GasParams<Scalar> const &p,
                               Scalar cfl = Scalar(0.9))
{
  Index const n = c.size();
  if (n < 2) { throw PreconditionError("rusanov_step needs at least 2 cells"); }
  for (Index i = 0; i < n; ++i) {
    if (!(c.rho(i) > 0)) { throw RegimeError("fvm: vacuum (rho <= 0) in cell " + std::to_string(i)); }
  }
  if (dt > stable_dt(c, p, cfl) * (1 + 1e-12)) { throw PreconditionError("fvm: CFL violated"); }

  Scalar const h = p.length / Scalar(n);
  Scalar const g = p.gamma;
  Scalar const w_bar = detail::baseline_invariant(p);

  // Extended arrays with one ghost cell at each end.
  ArrayX<Scalar> rho(n + 2), u(n + 2);
  for (Index i = 0; i < n; ++i) {
    rho(i + 1) = c.rho(i);
    u(i + 1) = c.mom(i) / c.rho(i);
  }
  {
    auto const [m_in, n_in] = detail::invariants(c.rho(0), u(1), g);
    (void)n_in;
    auto const [rg, ug] = detail::state_from_invariants(m_in, w_bar + bd.phi2(c.t, p.period), g);
    rho(0) = rg;
    u(0) = ug;
  }
  {
    auto const [m_in, n_in] = detail::invariants(c.rho(n - 1), u(n), g);
    (void)m_in;
    auto const [rg, ug] = detail::state_from_invariants(-w_bar + bd.phi1(c.t, p.period), n_in, g);
    rho(n + 1) = rg;
    u(n + 1) = ug;
  }

  ArrayX<Scalar> f_mass(n + 1), f_mom(n + 1);
  for (Index f = 0; f <= n; ++f) {
    Scalar const rl = rho(f), ul = u(f), rr = rho(f + 1), ur = u(f + 1);
    auto const [ml, pl] = conservative_flux(rl, ul, p);
    auto const [mr, pr] = conservative_flux(rr, ur, p);
    Scalar const a = std::max(std::abs(ul) + detail::sound(rl, g), std::abs(ur) + detail::sound(rr, g));
    f_mass(f) = (ml + mr) / 2 - a / 2 * (rr - rl);
    f_mom(f) = (pl + pr) / 2 - a / 2 * (rr * ur - rl * ul);
  }

  ConsCells<Scalar> out{c.t + dt, ArrayX<Scalar>(n), ArrayX<Scalar>(n)};
  for (Index i = 0; i < n; ++i) {
    Scalar const ui = u(i + 1);
    Scalar const beta = beta_at(friction, p.period, c.t, cell_center(i, n, p.length));
    Scalar const src = ui == 0 ? Scalar(0) : beta * c.rho(i) * std::copysign(std::pow(std::abs(ui), p.alpha + 1), ui);
    out.rho(i) = c.rho(i) - dt / h * (f_mass(i + 1) - f_mass(i));
    out.mom(i) = c.mom(i) - dt / h * (f_mom(i + 1) - f_mom(i)) + dt * src;
    if (!(out.rho(i) > 0) || !std::isfinite(out.mom(i))) {
      throw RegimeError("fvm: vacuum or blow-up in cell " + std::to_string(i));
    }
  }
  return out;
}

template <typename Scalar>
ConsCells<Scalar> run_fvm(ConsCells<Scalar> c, BoundaryData<Scalar> const &bd, FrictionSpec<Scalar> const &friction,
                          GasParams<Scalar> const &p, Scalar T, Scalar cfl = Scalar(0.9))
{
  while (c.t < T) {
    Scalar const dt = std::min(stable_dt(c, p, cfl), T - c.t);
    c = rusanov_step(c, dt, bd, friction, p, cfl);
    if (T - c.t < 1e-14 * T) { c.t = T; }
  }
  return c;
}

template <typename Scalar = double> struct FieldDiscrepancy
{
  Scalar linf1 = 0;
  Scalar linf2 = 0;
  Scalar l2_1 = 0;
  Scalar l2_2 = 0;

  Scalar linf() const { return std::max(linf1, linf2); }
};

/// Compares a perturbation profile on the nodes x_k = k L / (nx - 1) against
/// cell averages, evaluating the profile at cell centres by linear interpolation.
/// L2 norms are discrete, weighted by the cell width.
template <typename Scalar>
FieldDiscrepancy<Scalar> compare_fields(ArrayX<Scalar> const &phi1, ArrayX<Scalar> const &phi2,
                                        ConsCells<Scalar> const &b, GasParams<Scalar> const &p)
{
  Index const nx = phi1.size();
  Index const n = b.size();
  Scalar const w_bar = detail::baseline_invariant(p);
  Scalar const h = p.length / Scalar(n);
  FieldDiscrepancy<Scalar> d;
  for (Index i = 0; i < n; ++i) {
    Scalar const xi = cell_center(i, n, p.length) / p.length * Scalar(nx - 1);
    Index k0 = std::min<Index>(Index(std::floor(xi)), nx - 2);
    Scalar const w = xi - Scalar(k0);
    Scalar const a1 = (1 - w) * phi1(k0) + w * phi1(k0 + 1);
    Scalar const a2 = (1 - w) * phi2(k0) + w * phi2(k0 + 1);
    auto const [m, nn] = detail::invariants(b.rho(i), b.mom(i) / b.rho(i), p.gamma);
    Scalar const e1 = std::abs(m + w_bar - a1);
    Scalar const e2 = std::abs(nn - w_bar - a2);
    d.linf1 = std::max(d.linf1, e1);
    d.linf2 = std::max(d.linf2, e2);
    d.l2_1 += e1 * e1 * h;
    d.l2_2 += e2 * e2 * h;
  }
  d.l2_1 = std::sqrt(d.l2_1);
  d.l2_2 = std::sqrt(d.l2_2);
  return d;
}

} // namespace pipeflow::fvm
