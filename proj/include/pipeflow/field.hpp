#pragma once

#include <cmath>

#include "model.hpp"
#include "series.hpp"

namespace pipeflow {

/// Perturbation (phi1, phi2) on nodes t_j = j P / nt, x_k = k L / (nx - 1).
/// Rows are time, columns are space; the time axis is periodic, so row nt is
/// row 0 and is never stored.
template <typename Scalar = double> struct PeriodicField
{
  Index nt = 0;
  Index nx = 0;
  Scalar period{1};
  Scalar length{1};
  ArrayXX<Scalar> phi1;
  ArrayXX<Scalar> phi2;

  PeriodicField() = default;
  PeriodicField(Index nt_, Index nx_, Scalar period_, Scalar length_)
    : nt(nt_), nx(nx_), period(period_), length(length_), phi1(ArrayXX<Scalar>::Zero(nt_, nx_)),
      phi2(ArrayXX<Scalar>::Zero(nt_, nx_))
  {
    if (nt < 2 || nx < 2) { throw DomainError("periodic field needs at least 2 nodes per axis"); }
  }

  Scalar ht() const { return period / Scalar(nt); }
  Scalar hx() const { return length / Scalar(nx - 1); }
  Scalar t_at(Index j) const { return Scalar(j) * ht(); }
  Scalar x_at(Index k) const { return k == nx - 1 ? length : Scalar(k) * hx(); }
};

/// Locates t on the periodic time axis: rows (j0, j1 = j0 + 1 mod nt) and weight of j1.
template <typename Scalar> struct TimeCell
{
  Index j0;
  Index j1;
  Scalar w;
};

template <typename Scalar> TimeCell<Scalar> locate_time(Scalar t, Scalar period, Index nt)
{
  Scalar const s = wrap_time(t, period) / period * Scalar(nt);
  Index j = Index(std::floor(s));
  Scalar w = s - Scalar(j);
  if (j >= nt) {
    j = nt - 1;
    w = 1;
  }
  return {j, j + 1 == nt ? 0 : j + 1, w};
}

/// Fractional column index of x, clamped to [0, nx - 1].
template <typename Scalar> Scalar column_coordinate(Scalar x, Scalar length, Index nx)
{
  if (!(x >= 0 && x <= length)) { throw DomainError("query outside [0, L]"); }
  Scalar const xi = x / length * Scalar(nx - 1);
  return std::clamp(xi, Scalar(0), Scalar(nx - 1));
}

/// Bilinear interpolation of one table at (time cell, fractional column xi).
template <typename Derived, typename Scalar>
Scalar bilinear(Eigen::ArrayBase<Derived> const &a, TimeCell<Scalar> const &tc, Scalar xi)
{
  Index k0 = Index(std::floor(xi));
  if (k0 >= a.cols() - 1) { k0 = a.cols() - 2; }
  Scalar const wx = xi - Scalar(k0);
  Scalar const left = (1 - tc.w) * a(tc.j0, k0) + tc.w * a(tc.j1, k0);
  if (wx == 0) { return left; }
  Scalar const right = (1 - tc.w) * a(tc.j0, k0 + 1) + tc.w * a(tc.j1, k0 + 1);
  return (1 - wx) * left + wx * right;
}

template <typename Scalar>
Perturbation<Scalar> interpolate_field(PeriodicField<Scalar> const &f, Scalar t, Scalar x)
{
  auto const tc = locate_time(t, f.period, f.nt);
  Scalar const xi = column_coordinate(x, f.length, f.nx);
  return {bilinear(f.phi1, tc, xi), bilinear(f.phi2, tc, xi)};
}

template <typename Scalar> SubsonicReport<Scalar> subsonic_check(PeriodicField<Scalar> const &f, GasParams<Scalar> const &p)
{
  return subsonic_check(f.phi1, f.phi2, p);
}

/// max over nodes of |phi_i|, |d_t phi_i|, |d_x phi_i| with central differences
/// (periodic in t, one-sided at the x ends).
template <typename Scalar> Scalar c1_norm_estimate(PeriodicField<Scalar> const &f)
{
  if (f.nt < 3 || f.nx < 3) { throw PreconditionError("c1_norm_estimate needs nt, nx >= 3"); }
  Scalar const ht = f.ht();
  Scalar const hx = f.hx();
  Scalar norm = 0;
  for (auto const *a : {&f.phi1, &f.phi2}) {
    norm = std::max(norm, a->abs().maxCoeff());
    for (Index j = 0; j < f.nt; ++j) {
      Index const jp = (j + 1) % f.nt;
      Index const jm = (j + f.nt - 1) % f.nt;
      for (Index k = 0; k < f.nx; ++k) {
        Scalar const dt = ((*a)(jp, k) - (*a)(jm, k)) / (2 * ht);
        Scalar dx;
        if (k == 0) {
          dx = ((*a)(j, 1) - (*a)(j, 0)) / hx;
        } else if (k == f.nx - 1) {
          dx = ((*a)(j, k) - (*a)(j, k - 1)) / hx;
        } else {
          dx = ((*a)(j, k + 1) - (*a)(j, k - 1)) / (2 * hx);
        }
        norm = std::max({norm, std::abs(dt), std::abs(dx)});
      }
    }
  }
  return norm;
}

template <typename Scalar> Scalar c0_norm(PeriodicField<Scalar> const &f)
{
  return std::max(f.phi1.abs().maxCoeff(), f.phi2.abs().maxCoeff());
}

template <typename Scalar> Scalar sup_distance(PeriodicField<Scalar> const &a, PeriodicField<Scalar> const &b)
{
  return std::max((a.phi1 - b.phi1).abs().maxCoeff(), (a.phi2 - b.phi2).abs().maxCoeff());
}

} // namespace pipeflow
