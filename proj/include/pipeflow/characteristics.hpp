#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "field.hpp"
#include "friction.hpp"

namespace pipeflow {

template <typename Scalar = double> struct CharSample
{
  Scalar x;
  Scalar t;
  Scalar column; // fractional grid column of x
};

/// Characteristic curve t = t_i(x) of family 1 (runs to x = L) or 2 (runs to x = 0).
template <typename Scalar = double> struct CharPath
{
  int family = 1;
  std::vector<CharSample<Scalar>> samples;

  CharSample<Scalar> const &terminal() const { return samples.back(); }
};

/// Traces characteristics of the swapped (x-evolution) form dt/dx = nu_i
/// through a frozen background field. The tracer keeps a pointer to the field;
/// the field must outlive it and must not be modified while tracing.
///
/// Speeds are interpolated bilinearly; since lambda_i is linear in phi this
/// equals lambda_i of the bilinearly interpolated background.
template <typename Scalar = double> class CharTracer
{
public:
  struct Landing
  {
    Scalar t;        // time where the curve meets the family's inflow boundary
    Scalar integral; // source integral from that boundary back to the start
  };

  CharTracer(PeriodicField<Scalar> const &field, GasParams<Scalar> const &gas, FrictionSpec<Scalar> const &friction)
    : field_(&field), gas_(gas), friction_(friction), inv_ht_(Scalar(field.nt) / field.period),
      lambda1_(field.nt, field.nx), lambda2_(field.nt, field.nx), lambda1_half_(field.nt, field.nx - 1),
      lambda2_half_(field.nt, field.nx - 1), sum_(field.phi1 + field.phi2)
  {
    Scalar const mb = gas.m_bar();
    Scalar const nb = gas.n_bar();
    for (Index k = 0; k < field.nx; ++k) {
      for (Index j = 0; j < field.nt; ++j) {
        Scalar const m = field.phi1(j, k) + mb;
        Scalar const n = field.phi2(j, k) + nb;
        lambda1_(j, k) = lambda1(m, n, gas);
        lambda2_(j, k) = lambda2(m, n, gas);
      }
    }
    lambda1_half_ = (lambda1_.leftCols(field.nx - 1) + lambda1_.rightCols(field.nx - 1)) / 2;
    lambda2_half_ = (lambda2_.leftCols(field.nx - 1) + lambda2_.rightCols(field.nx - 1)) / 2;
  }

  PeriodicField<Scalar> const &field() const { return *field_; }

  /// Reciprocal speed of `family` at time t and fractional column xi.
  Scalar nu(int family, Scalar t, Scalar xi) const { return nu(family, cell(t), xi); }

  CharPath<Scalar> trace(int family, Scalar t0, Scalar x0) const
  {
    check_family(family);
    Scalar const phase = wrap_time(t0, field_->period);
    Scalar const shift = t0 - phase;
    CharPath<Scalar> path{family, {}};
    march(family, phase, column_coordinate(x0, field_->length, field_->nx),
          [&](Scalar xi, Scalar t, TimeCell<Scalar> const &, Scalar) {
            path.samples.push_back({position(xi), t + shift, xi});
          });
    return path;
  }

  /// Composite trapezoidal rule for int (beta / 2) nu_i |s|^alpha s dy from
  /// the path's boundary end to its start.
  Scalar integrate_source(CharPath<Scalar> const &path) const
  {
    check_family(path.family);
    Scalar acc = 0;
    Scalar g_prev = 0;
    for (std::size_t m = 0; m < path.samples.size(); ++m) {
      auto const &s = path.samples[m];
      auto const tc = cell(s.t);
      Scalar const g = integrand(s.t, s.column, tc, nu(path.family, tc, s.column));
      if (m > 0) { acc += (s.column - path.samples[m - 1].column) * field_->hx() * (g_prev + g) / 2; }
      g_prev = g;
    }
    return -acc;
  }

  /// trace + integrate_source from node (t_j, x_k) without storing the path.
  Landing transport(int family, Index j, Index k) const
  {
    check_family(family);
    Scalar acc = 0;
    Scalar g_prev = 0;
    Scalar xi_prev = 0;
    Scalar t_last = 0;
    bool first = true;
    Scalar const hx = field_->hx();
    march(family, field_->t_at(j), Scalar(k), [&](Scalar xi, Scalar t, TimeCell<Scalar> const &tc, Scalar nu_here) {
      Scalar const g = integrand(t, xi, tc, nu_here);
      if (!first) { acc += (xi - xi_prev) * hx * (g_prev + g) / 2; }
      first = false;
      g_prev = g;
      xi_prev = xi;
      t_last = t;
    });
    return {t_last, -acc};
  }

  static constexpr int batch_width = 8;

  /// transport() for nodes (t_j, x_k), j = j0 .. j0 + count - 1 (count <= batch_width),
  /// marched in lockstep with table columns addressed directly. Agrees with
  /// transport() to rounding.
  void transport_batch(int family, Index j0, int count, Index k, Landing *out) const
  {
    check_family(family);
    if (family == 1) {
      transport_batch_impl<1>(j0, count, k, out);
    } else {
      transport_batch_impl<2>(j0, count, k, out);
    }
  }

private:
  template <int family> void transport_batch_impl(Index j0, int count, Index k, Landing *out) const
  {
    Index const nt = field_->nt;
    Index const last = field_->nx - 1;
    Index const step = family == 1 ? 1 : -1;
    Index const end = family == 1 ? last : 0;
    Scalar const hx = field_->hx();
    Scalar const dx = Scalar(step) * hx;
    bool const constant_beta = friction_.is_constant();
    bool const frictionless = constant_beta && friction_.value == 0;
    ArrayXX<Scalar> const &full = family == 1 ? lambda1_ : lambda2_;
    ArrayXX<Scalar> const &half = family == 1 ? lambda1_half_ : lambda2_half_;

    auto lerp = [&](Scalar const *col, TimeCell<Scalar> const &tc) { return (1 - tc.w) * col[tc.j0] + tc.w * col[tc.j1]; };
    auto recip = [&](Scalar lam) {
      if constexpr (family == 1) {
        if (!(lam < 0)) { sonic(family, lam); }
      } else {
        if (!(lam > 0)) { sonic(family, lam); }
      }
      return 1 / lam;
    };
    auto source = [&](Scalar t, Index col, TimeCell<Scalar> const &tc, Scalar nu_here) {
      if (frictionless) { return Scalar(0); }
      Scalar const sm = lerp(sum_.data() + col * nt, tc);
      if (sm == 0) { return Scalar(0); }
      Scalar const beta = constant_beta ? friction_.value : beta_at(friction_, field_->period, t, position(Scalar(col)));
      Scalar const pw = gas_.alpha == 1 ? sm * std::abs(sm) : signed_power(sm, gas_.alpha);
      return beta / 2 * nu_here * pw;
    };

    std::array<Scalar, batch_width> t{}, k1{}, g_prev{}, acc{};
    for (int b = 0; b < count; ++b) {
      t[b] = field_->t_at(j0 + b);
      auto const tc = cell(t[b]);
      k1[b] = recip(lerp(full.data() + k * nt, tc));
      g_prev[b] = source(t[b], k, tc, k1[b]);
    }
    for (Index c = k; c != end; c += step) {
      Index const cn = c + step;
      Scalar const *mid = half.data() + std::min(c, cn) * nt;
      Scalar const *nxt = full.data() + cn * nt;
      for (int b = 0; b < count; ++b) {
        Scalar const k2 = recip(lerp(mid, cell(t[b] + dx / 2 * k1[b])));
        Scalar const k3 = recip(lerp(mid, cell(t[b] + dx / 2 * k2)));
        Scalar const k4 = recip(lerp(nxt, cell(t[b] + dx * k3)));
        t[b] += dx / 6 * (k1[b] + 2 * k2 + 2 * k3 + k4);
        if (!std::isfinite(t[b])) { throw NumericError("characteristic integration produced a non-finite time"); }
        auto const tc = cell(t[b]);
        k1[b] = recip(lerp(nxt, tc));
        Scalar const g = source(t[b], cn, tc, k1[b]);
        acc[b] += Scalar(step) * hx * (g_prev[b] + g) / 2;
        g_prev[b] = g;
      }
    }
    for (int b = 0; b < count; ++b) { out[b] = {t[b], -acc[b]}; }
  }

  static void check_family(int family)
  {
    if (family != 1 && family != 2) { throw DomainError("characteristic family must be 1 or 2"); }
  }

  TimeCell<Scalar> cell(Scalar t) const
  {
    Scalar const s = t * inv_ht_;
    Scalar const fl = std::floor(s);
    Index j = Index(fl);
    while (j >= field_->nt) { j -= field_->nt; }
    while (j < 0) { j += field_->nt; }
    return {j, j + 1 == field_->nt ? 0 : j + 1, s - fl};
  }

  // Node columns and half columns come from tables; anything else is bilinear.
  Scalar speed(ArrayXX<Scalar> const &full, ArrayXX<Scalar> const &half, TimeCell<Scalar> const &tc, Scalar xi) const
  {
    Scalar const fl = std::floor(xi);
    Index const k = Index(fl);
    Scalar const frac = xi - fl;
    if (frac == 0) { return (1 - tc.w) * full(tc.j0, k) + tc.w * full(tc.j1, k); }
    if (frac == Scalar(0.5)) { return (1 - tc.w) * half(tc.j0, k) + tc.w * half(tc.j1, k); }
    return bilinear(full, tc, xi);
  }

  Scalar nu(int family, TimeCell<Scalar> const &tc, Scalar xi) const
  {
    if (family == 1) {
      Scalar const lam = speed(lambda1_, lambda1_half_, tc, xi);
      if (!(lam < 0)) { sonic(family, lam); }
      return 1 / lam;
    }
    Scalar const lam = speed(lambda2_, lambda2_half_, tc, xi);
    if (!(lam > 0)) { sonic(family, lam); }
    return 1 / lam;
  }

  [[noreturn]] static void sonic(int family, Scalar lam)
  {
    throw SonicError("sonic degeneracy while tracing family " + std::to_string(family) +
                     " (lambda = " + std::to_string(double(lam)) + ")");
  }

  Scalar position(Scalar xi) const
  {
    return xi == Scalar(field_->nx - 1) ? field_->length : xi * field_->hx();
  }

  Scalar integrand(Scalar t, Scalar xi, TimeCell<Scalar> const &tc, Scalar nu_here) const
  {
    if (friction_.is_constant() && friction_.value == 0) { return 0; }
    Scalar const s = bilinear(sum_, tc, xi);
    if (s == 0) { return 0; }
    Scalar const beta = beta_at(friction_, field_->period, t, position(xi));
    Scalar const a = std::abs(s);
    Scalar const pw = gas_.alpha == 1 ? s * a : signed_power(s, gas_.alpha);
    return beta / 2 * nu_here * pw;
  }

  // Classical RK4 in x with step h_x (shorter final step if the start is off-grid).
  // Calls visit(xi, t, time cell, nu) at the start and after every step.
  template <typename Visit> void march(int family, Scalar t, Scalar xi, Visit &&visit) const
  {
    Scalar const end = family == 1 ? Scalar(field_->nx - 1) : Scalar(0);
    Scalar const dir = family == 1 ? Scalar(1) : Scalar(-1);
    Scalar const hx = field_->hx();
    auto tc = cell(t);
    Scalar k1 = nu(family, tc, xi);
    visit(xi, t, tc, k1);
    while (xi != end) {
      Scalar const span = std::min(Scalar(1), std::abs(end - xi));
      Scalar const dx = dir * span * hx;
      Scalar const xm = xi + dir * span / 2;
      Scalar const xn = span == 1 ? xi + dir : end;
      Scalar const k2 = nu(family, cell(t + dx / 2 * k1), xm);
      Scalar const k3 = nu(family, cell(t + dx / 2 * k2), xm);
      Scalar const k4 = nu(family, cell(t + dx * k3), xn);
      t += dx / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
      if (!std::isfinite(t)) { throw NumericError("characteristic integration produced a non-finite time"); }
      xi = xn;
      tc = cell(t);
      k1 = nu(family, tc, xi);
      visit(xi, t, tc, k1);
    }
  }

  PeriodicField<Scalar> const *field_;
  GasParams<Scalar> gas_;
  FrictionSpec<Scalar> friction_;
  Scalar inv_ht_;
  ArrayXX<Scalar> lambda1_;
  ArrayXX<Scalar> lambda2_;
  ArrayXX<Scalar> lambda1_half_;
  ArrayXX<Scalar> lambda2_half_;
  ArrayXX<Scalar> sum_;
};

template <typename Scalar>
CharPath<Scalar> trace_characteristic(int family, Scalar t0, Scalar x0, PeriodicField<Scalar> const &f,
                                      GasParams<Scalar> const &p, FrictionSpec<Scalar> const &spec)
{
  return CharTracer<Scalar>(f, p, spec).trace(family, t0, x0);
}

template <typename Scalar>
Scalar integrate_source_along(CharPath<Scalar> const &path, PeriodicField<Scalar> const &f,
                              FrictionSpec<Scalar> const &spec, GasParams<Scalar> const &p)
{
  return CharTracer<Scalar>(f, p, spec).integrate_source(path);
}

} // namespace pipeflow
