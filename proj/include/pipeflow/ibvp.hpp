#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "boundary.hpp"
#include "friction.hpp"
#include "model.hpp"

namespace pipeflow {

/// Perturbation profile on x_k = k L / (nx - 1) at time t.
template <typename Scalar = double> struct IbvpState
{
  Scalar t{0};
  ArrayX<Scalar> phi1;
  ArrayX<Scalar> phi2;

  Index nx() const { return phi1.size(); }
};

enum class BoundaryKind
{
  dirichlet,
  reflective
};

/// Reflective closures: phi2(t,0) = phi2b(t) + K1 phi1(t,0), phi1(t,L) = phi1b(t) + K2 phi2(t,L).
template <typename Scalar = double> struct BoundaryMode
{
  BoundaryKind kind = BoundaryKind::dirichlet;
  Scalar K1 = 0;
  Scalar K2 = 0;

  static BoundaryMode dirichlet() { return {}; }
  static BoundaryMode reflective(Scalar k1, Scalar k2) { return {BoundaryKind::reflective, k1, k2}; }
};

template <typename Scalar> void validate(BoundaryMode<Scalar> const &mode)
{
  if (mode.kind == BoundaryKind::reflective && !(std::abs(mode.K1) < 1 && std::abs(mode.K2) < 1)) {
    throw DomainError("reflection coefficients need |K1| < 1 and |K2| < 1");
  }
}

template <typename Scalar = double> struct CompatibilityReport
{
  Scalar order0_left = 0;  // phi2b(0) vs phi2_0(0)
  Scalar order0_right = 0; // phi1b(0) vs phi1_0(L)
  Scalar order1_left = 0;  // family 2 at (0, 0)
  Scalar order1_right = 0; // family 1 at (0, L)
  Scalar order1_tol = 0;
  bool order1_checked = true;

  bool pass() const
  {
    bool ok = order0_left <= Scalar(1e-12) && order0_right <= Scalar(1e-12);
    if (order1_checked) { ok = ok && order1_left <= order1_tol && order1_right <= order1_tol; }
    return ok;
  }
};

/// Corner conditions between initial and boundary data. Spatial derivatives of
/// the initial profile use one-sided differences. In reflective mode only the
/// order-0 conditions (with the K closures) are checked.
template <typename Scalar>
CompatibilityReport<Scalar> check_compatibility(ArrayX<Scalar> const &init1, ArrayX<Scalar> const &init2,
                                                BoundaryData<Scalar> const &bd, FrictionSpec<Scalar> const &friction,
                                                GasParams<Scalar> const &gas,
                                                BoundaryMode<Scalar> const &mode = BoundaryMode<Scalar>::dirichlet())
{
  Index const nx = init1.size();
  if (nx < 2 || init2.size() != nx) { throw PreconditionError("initial profiles need matching sizes >= 2"); }
  Scalar const P = gas.period;
  Scalar const L = gas.length;
  Scalar const hx = L / Scalar(nx - 1);
  CompatibilityReport<Scalar> rep;
  rep.order1_tol = 10 * hx;
  Index const last = nx - 1;

  if (mode.kind == BoundaryKind::reflective) {
    rep.order0_left = std::abs(bd.phi2(0, P) + mode.K1 * init1(0) - init2(0));
    rep.order0_right = std::abs(bd.phi1(0, P) + mode.K2 * init2(last) - init1(last));
    rep.order1_checked = false;
    return rep;
  }

  rep.order0_left = std::abs(bd.phi2(0, P) - init2(0));
  rep.order0_right = std::abs(bd.phi1(0, P) - init1(last));

  Scalar const mb = gas.m_bar();
  Scalar const nb = gas.n_bar();
  Scalar const d1 = (init1(last) - init1(last - 1)) / hx;
  Scalar const l1 = lambda1(init1(last) + mb, init2(last) + nb, gas);
  Scalar const src_r = source_term(bd.phi1(0, P), init2(last), beta_at(friction, P, Scalar(0), L), gas);
  rep.order1_right = std::abs(bd.phi1b.derivative(0, P) + l1 * d1 - src_r);

  Scalar const d2 = (init2(1) - init2(0)) / hx;
  Scalar const l2 = lambda2(init1(0) + mb, init2(0) + nb, gas);
  Scalar const src_l = source_term(init1(0), bd.phi2(0, P), beta_at(friction, P, Scalar(0), Scalar(0)), gas);
  rep.order1_left = std::abs(bd.phi2b.derivative(0, P) + l2 * d2 - src_l);
  return rep;
}

/// base + a sin^2(pi x / L) on both components; value and slope of the bump vanish at both ends.
template <typename Scalar>
std::pair<ArrayX<Scalar>, ArrayX<Scalar>> make_compatible_perturbation(ArrayX<Scalar> const &base1,
                                                                       ArrayX<Scalar> const &base2, Scalar amplitude,
                                                                       GasParams<Scalar> const &gas)
{
  Index const nx = base1.size();
  ArrayX<Scalar> out1 = base1;
  ArrayX<Scalar> out2 = base2;
  if (amplitude == 0) { return {out1, out2}; }
  Scalar const hx = gas.length / Scalar(nx - 1);
  for (Index k = 1; k + 1 < nx; ++k) {
    Scalar const s = std::sin(std::numbers::pi_v<Scalar> * Scalar(k) * hx / gas.length);
    out1(k) += amplitude * s * s;
    out2(k) += amplitude * s * s;
  }
  return {out1, out2};
}

/// Largest stable step: cfl * h_x / max_k max(|lambda1|, |lambda2|).
template <typename Scalar>
Scalar stable_dt(IbvpState<Scalar> const &s, GasParams<Scalar> const &gas, Scalar cfl, Scalar length)
{
  Scalar const hx = length / Scalar(s.nx() - 1);
  Scalar const mb = gas.m_bar();
  Scalar const nb = gas.n_bar();
  Scalar vmax = 0;
  for (Index k = 0; k < s.nx(); ++k) {
    Scalar const m = s.phi1(k) + mb;
    Scalar const n = s.phi2(k) + nb;
    vmax = std::max({vmax, std::abs(lambda1(m, n, gas)), std::abs(lambda2(m, n, gas))});
  }
  return cfl * hx / vmax;
}

/// One step of first-order upwind on the Riemann-invariant form. Transport
/// uses speeds frozen at the current node; the friction source is advanced
/// with a Heun predictor-corrector.
template <typename Scalar>
IbvpState<Scalar> step_ibvp(IbvpState<Scalar> const &s, Scalar dt, BoundaryData<Scalar> const &bd,
                            BoundaryMode<Scalar> const &mode, FrictionSpec<Scalar> const &friction,
                            GasParams<Scalar> const &gas, Scalar cfl = Scalar(0.9))
{
  Index const nx = s.nx();
  if (nx < 3) { throw PreconditionError("step_ibvp needs at least 3 nodes"); }
  if (!(dt > 0)) { throw PreconditionError("time step must be positive"); }
  Scalar const limit = stable_dt(s, gas, cfl, gas.length);
  if (dt > limit * (1 + 8 * std::numeric_limits<Scalar>::epsilon())) {
    throw PreconditionError("CFL violated: dt = " + std::to_string(double(dt)) +
                            " exceeds " + std::to_string(double(limit)));
  }
  Scalar const L = gas.length;
  Scalar const P = gas.period;
  Scalar const hx = L / Scalar(nx - 1);
  Scalar const mb = gas.m_bar();
  Scalar const nb = gas.n_bar();
  Scalar const t1 = s.t + dt;
  auto xk = [&](Index k) { return k == nx - 1 ? L : Scalar(k) * hx; };

  IbvpState<Scalar> next{t1, ArrayX<Scalar>(nx), ArrayX<Scalar>(nx)};
  for (Index k = 0; k < nx; ++k) {
    Scalar const m = s.phi1(k) + mb;
    Scalar const n = s.phi2(k) + nb;
    Scalar const x = xk(k);
    Scalar const src0 = source_term(s.phi1(k), s.phi2(k), beta_at(friction, P, s.t, x), gas);
    // phi1 travels left: forward difference. phi2 travels right: backward difference.
    Scalar const tr1 = k + 1 < nx ? -lambda1(m, n, gas) * (s.phi1(k + 1) - s.phi1(k)) / hx : Scalar(0);
    Scalar const tr2 = k > 0 ? -lambda2(m, n, gas) * (s.phi2(k) - s.phi2(k - 1)) / hx : Scalar(0);
    Scalar const p1 = s.phi1(k) + dt * (tr1 + src0);
    Scalar const p2 = s.phi2(k) + dt * (tr2 + src0);
    Scalar const src1 = source_term(p1, p2, beta_at(friction, P, t1, x), gas);
    Scalar const src = (src0 + src1) / 2;
    next.phi1(k) = s.phi1(k) + dt * (tr1 + src);
    next.phi2(k) = s.phi2(k) + dt * (tr2 + src);
  }

  next.phi2(0) = bd.phi2(t1, P);
  next.phi1(nx - 1) = bd.phi1(t1, P);
  if (mode.kind == BoundaryKind::reflective) {
    if (mode.K1 != 0) { next.phi2(0) += mode.K1 * next.phi1(0); }
    if (mode.K2 != 0) { next.phi1(nx - 1) += mode.K2 * next.phi2(nx - 1); }
  }

  auto const check = subsonic_check(next.phi1, next.phi2, gas);
  if (!check.pass() || !next.phi1.allFinite() || !next.phi2.allFinite()) {
    throw RegimeError("IBVP step at t = " + std::to_string(double(t1)) + " left the subsonic regime");
  }
  return next;
}

template <typename Scalar = double> struct Trajectory
{
  std::vector<IbvpState<Scalar>> snapshots;
  Scalar max_c0 = 0;
  long steps = 0;
};

/// Mid-run regime failure; `partial` holds the snapshots emitted so far.
template <typename Scalar = double> struct IbvpRegimeError : RegimeError
{
  Trajectory<Scalar> partial;
  IbvpRegimeError(std::string const &what, Trajectory<Scalar> traj) : RegimeError(what), partial(std::move(traj)) {}
};

template <typename Scalar = double> struct IbvpOptions
{
  Scalar cfl = Scalar(0.9);
  Scalar dt = 0; // > 0: fixed step (checked against CFL every step); 0: largest stable step
  bool require_compatibility = true;
};

/// Runs from t = 0 to T, emitting snapshots at the requested (ascending) times
/// in [0, T]. A snapshot falling inside a step is the linear interpolation in t
/// of the two states bracketing it.
template <typename Scalar>
Trajectory<Scalar> run_ibvp(ArrayX<Scalar> const &init1, ArrayX<Scalar> const &init2, BoundaryData<Scalar> const &bd,
                            BoundaryMode<Scalar> const &mode, FrictionSpec<Scalar> const &friction,
                            GasParams<Scalar> const &gas, Scalar T, std::vector<Scalar> const &snapshot_times,
                            IbvpOptions<Scalar> const &opt = {})
{
  validate(gas);
  validate(mode);
  if (!(T > 0)) { throw PreconditionError("run_ibvp needs T > 0"); }
  if (!(opt.cfl > 0 && opt.cfl <= Scalar(0.95))) { throw PreconditionError("cfl must lie in (0, 0.95]"); }
  auto const compat = check_compatibility(init1, init2, bd, friction, gas, mode);
  if (opt.require_compatibility && mode.kind == BoundaryKind::dirichlet && !compat.pass()) {
    throw PreconditionError("initial data are not compatible with the boundary data");
  }
  for (std::size_t i = 0; i < snapshot_times.size(); ++i) {
    if (snapshot_times[i] < 0 || snapshot_times[i] > T || (i > 0 && snapshot_times[i] < snapshot_times[i - 1])) {
      throw PreconditionError("snapshot times must be ascending within [0, T]");
    }
  }

  Trajectory<Scalar> traj;
  IbvpState<Scalar> cur{0, init1, init2};
  if (!subsonic_check(cur.phi1, cur.phi2, gas).pass()) {
    throw IbvpRegimeError<Scalar>("initial data are not subsonic", traj);
  }
  auto emit = [&](IbvpState<Scalar> snap) {
    traj.max_c0 = std::max({traj.max_c0, snap.phi1.abs().maxCoeff(), snap.phi2.abs().maxCoeff()});
    traj.snapshots.push_back(std::move(snap));
  };
  std::size_t next_snap = 0;
  while (next_snap < snapshot_times.size() && snapshot_times[next_snap] == 0) {
    emit(cur);
    ++next_snap;
  }
  traj.max_c0 = std::max({traj.max_c0, cur.phi1.abs().maxCoeff(), cur.phi2.abs().maxCoeff()});
  while (cur.t < T) {
    Scalar const dt = opt.dt > 0 ? opt.dt : stable_dt(cur, gas, opt.cfl, gas.length);
    IbvpState<Scalar> nxt;
    try {
      nxt = step_ibvp(cur, dt, bd, mode, friction, gas, opt.cfl);
    } catch (RegimeError const &e) {
      throw IbvpRegimeError<Scalar>(e.what(), traj);
    }
    ++traj.steps;
    while (next_snap < snapshot_times.size() && snapshot_times[next_snap] <= nxt.t) {
      Scalar const ts = snapshot_times[next_snap];
      Scalar const w = (ts - cur.t) / (nxt.t - cur.t);
      emit({ts, (1 - w) * cur.phi1 + w * nxt.phi1, (1 - w) * cur.phi2 + w * nxt.phi2});
      ++next_snap;
    }
    traj.max_c0 = std::max({traj.max_c0, nxt.phi1.abs().maxCoeff(), nxt.phi2.abs().maxCoeff()});
    cur = std::move(nxt);
  }
  return traj;
}

/// 0, every, 2 every, ... up to T (T itself always included).
template <typename Scalar> std::vector<Scalar> snapshot_cadence(Scalar T, Scalar every)
{
  std::vector<Scalar> out;
  if (every > 0) {
    for (Index i = 0; Scalar(i) * every < T; ++i) { out.push_back(Scalar(i) * every); }
  } else {
    out.push_back(0);
  }
  out.push_back(T);
  return out;
}

} // namespace pipeflow
