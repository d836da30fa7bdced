#pragma once

#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "ibvp.hpp"
#include "periodic_solver.hpp"

namespace pipeflow {

template <typename Scalar = double> struct DecayFit
{
  Scalar xi_hat = 0;
  std::vector<Scalar> ratios; // d_{k+1} / d_k over the fitted points
  Index points = 0;
};

/// Least-squares fit of log d_k = log C + k log xi over the leading run of
/// entries strictly above `noise_floor`.
template <typename Scalar> DecayFit<Scalar> fit_decay(std::vector<Scalar> const &d, Scalar noise_floor = 0)
{
  Index usable = 0;
  while (usable < Index(d.size()) && d[std::size_t(usable)] > noise_floor) { ++usable; }
  if (usable < 3) {
    throw InsufficientDataError("decay fit needs 3 distances above the noise floor, found " + std::to_string(usable));
  }
  DecayFit<Scalar> fit;
  fit.points = usable;
  Scalar const n = Scalar(usable);
  Scalar const kbar = (n - 1) / 2;
  Scalar ybar = 0;
  for (Index k = 0; k < usable; ++k) { ybar += std::log(d[std::size_t(k)]); }
  ybar /= n;
  Scalar sxy = 0;
  Scalar sxx = 0;
  for (Index k = 0; k < usable; ++k) {
    sxy += (Scalar(k) - kbar) * (std::log(d[std::size_t(k)]) - ybar);
    sxx += (Scalar(k) - kbar) * (Scalar(k) - kbar);
  }
  fit.xi_hat = std::exp(sxy / sxx);
  for (Index k = 0; k + 1 < usable; ++k) { fit.ratios.push_back(d[std::size_t(k + 1)] / d[std::size_t(k)]); }
  return fit;
}

/// Fraction of consecutive pairs with d_{k+1} <= 1.05 d_k. Entries below the
/// floor are indistinguishable from it and are compared as the floor.
template <typename Scalar> Scalar monotone_fraction(std::vector<Scalar> const &d, Scalar noise_floor = 0)
{
  if (d.size() < 2) { return 1; }
  Index good = 0;
  for (std::size_t k = 0; k + 1 < d.size(); ++k) {
    if (std::max(d[k + 1], noise_floor) <= std::max(d[k], noise_floor) * Scalar(1.05)) { ++good; }
  }
  return Scalar(good) / Scalar(d.size() - 1);
}

namespace detail {

template <typename Scalar>
IbvpState<Scalar> const &snapshot_near(Trajectory<Scalar> const &traj, Scalar t)
{
  Scalar const tol = Scalar(1e-12) * std::max(Scalar(1), std::abs(t));
  for (auto const &s : traj.snapshots) {
    if (std::abs(s.t - t) <= tol) { return s; }
  }
  throw PreconditionError("trajectory has no snapshot at t = " + std::to_string(double(t)) + " (too short?)");
}

} // namespace detail

/// d_k = max_i max_x |phi_i(k T0, x) - phi_i^(P)(k T0, x)| for k = 0..K. The
/// trajectory must share the field's x grid and hold snapshots at every k T0.
template <typename Scalar>
std::vector<Scalar> window_distances(Trajectory<Scalar> const &traj, PeriodicField<Scalar> const &phiP, Scalar T0,
                                     int K)
{
  std::vector<Scalar> d;
  for (int k = 0; k <= K; ++k) {
    auto const &s = detail::snapshot_near(traj, Scalar(k) * T0);
    if (s.nx() != phiP.nx) { throw PreconditionError("trajectory and periodic field use different x grids"); }
    auto const [a, b] = profile_at(phiP, s.t);
    d.push_back(std::max((s.phi1 - a).abs().maxCoeff(), (s.phi2 - b).abs().maxCoeff()));
  }
  return d;
}

/// Same windows, distance between two trajectories on a common grid.
template <typename Scalar>
std::vector<Scalar> orbit_distances(Trajectory<Scalar> const &x, Trajectory<Scalar> const &y, Scalar T0, int K)
{
  std::vector<Scalar> d;
  for (int k = 0; k <= K; ++k) {
    auto const &a = detail::snapshot_near(x, Scalar(k) * T0);
    auto const &b = detail::snapshot_near(y, Scalar(k) * T0);
    d.push_back(std::max((a.phi1 - b.phi1).abs().maxCoeff(), (a.phi2 - b.phi2).abs().maxCoeff()));
  }
  return d;
}

template <typename Scalar = double> struct StabilityConfig
{
  GasParams<Scalar> gas;
  FrictionSpec<Scalar> friction;
  BoundaryData<Scalar> boundary;
  GridSize grid{256, 256};
  PeriodicOptions<Scalar> solver;
  Scalar amplitude = Scalar(0.005);
  int windows = 8;
  BoundaryMode<Scalar> mode;
  Scalar cfl = Scalar(0.9);
};

template <typename Scalar = double> struct StabilityReport
{
  Scalar T0 = 0;
  Scalar dt = 0;
  // Windowed distances of the perturbed run to the unperturbed run started on
  // phi^(P)(0, .) with the same scheme and step; these carry the fit.
  std::vector<Scalar> distances;
  // Windowed distances of the perturbed run to the characteristic phi^(P).
  std::vector<Scalar> raw_distances;
  Scalar closure_residual = 0; // |upwind run over one period - phi^(P)(0, .)|
  Scalar raw_floor = 0;        // 10 x closure residual
  Scalar noise_floor = 0;      // floor applied to `distances`
  std::optional<Scalar> xi_hat;
  std::vector<Scalar> ratios;
  Index fit_points = 0;
  Scalar monotone_fraction = 0;
  bool trivial = false;
  bool regime_failure = false; // perturbed run left the subsonic regime; see note
  bool pass = false;
  std::string note;
};

namespace detail {

// Roundoff accumulated by the difference of two runs with identical steps.
template <typename Scalar> Scalar roundoff_floor(long steps, Scalar magnitude)
{
  return 10 * Scalar(std::max(1L, steps)) * std::numeric_limits<Scalar>::epsilon() * std::max(magnitude, Scalar(1e-300));
}

// Fixed step valid for every state within `amplitude` of phi^(P).
template <typename Scalar>
Scalar window_step(PeriodicField<Scalar> const &phiP, GasParams<Scalar> const &gas, Scalar amplitude, Scalar cfl)
{
  Scalar const mb = gas.m_bar();
  Scalar const nb = gas.n_bar();
  Scalar vmax = 0;
  for (Index k = 0; k < phiP.nx; ++k) {
    for (Index j = 0; j < phiP.nt; ++j) {
      Scalar const m = phiP.phi1(j, k) + mb;
      Scalar const n = phiP.phi2(j, k) + nb;
      vmax = std::max({vmax, std::abs(lambda1(m, n, gas)), std::abs(lambda2(m, n, gas))});
    }
  }
  Scalar const spread = (std::abs(gas.gamma + 1) + std::abs(3 - gas.gamma)) / 2 * std::abs(amplitude);
  return cfl * phiP.hx() / (vmax * Scalar(1.01) + spread);
}

template <typename Scalar> std::vector<Scalar> window_times(Scalar T0, int K)
{
  std::vector<Scalar> ts;
  for (int k = 0; k <= K; ++k) { ts.push_back(Scalar(k) * T0); }
  return ts;
}

} // namespace detail

/// Upwind run from phi^(P)(0, .) over one period compared with its start.
template <typename Scalar>
Scalar closure_residual(PeriodicField<Scalar> const &phiP, BoundaryData<Scalar> const &bd,
                        FrictionSpec<Scalar> const &friction, GasParams<Scalar> const &gas, Scalar cfl = Scalar(0.9))
{
  auto const [a, b] = profile_at(phiP, Scalar(0));
  IbvpOptions<Scalar> opt;
  opt.cfl = cfl;
  auto const traj = run_ibvp(a, b, bd, BoundaryMode<Scalar>::dirichlet(), friction, gas, gas.period,
                             std::vector<Scalar>{gas.period}, opt);
  auto const &end = traj.snapshots.back();
  return std::max((end.phi1 - a).abs().maxCoeff(), (end.phi2 - b).abs().maxCoeff());
}

/// Perturbs phi^(P)(0, .) by a sin^2 bump, runs K windows of length T0 = L nu_max,
/// and fits the per-window decay ratio.
template <typename Scalar>
StabilityReport<Scalar> run_stability_experiment(StabilityConfig<Scalar> const &cfg,
                                                 PeriodicSolution<Scalar> const &periodic)
{
  auto const &phiP = periodic.field;
  auto const &gas = cfg.gas;
  StabilityReport<Scalar> rep;
  rep.T0 = gas.length * subsonic_check(phiP, gas).nu_max;
  rep.dt = detail::window_step(phiP, gas, cfg.amplitude, cfg.cfl);
  rep.closure_residual = closure_residual(phiP, cfg.boundary, cfg.friction, gas, cfg.cfl);
  rep.raw_floor = 10 * rep.closure_residual;

  auto const [a, b] = profile_at(phiP, Scalar(0));
  auto const [pa, pb] = make_compatible_perturbation(a, b, cfg.amplitude, gas);
  Scalar const T = Scalar(cfg.windows) * rep.T0;
  auto const times = detail::window_times(rep.T0, cfg.windows);
  IbvpOptions<Scalar> opt;
  opt.cfl = cfg.cfl;
  opt.dt = rep.dt;
  Trajectory<Scalar> perturbed;
  try {
    perturbed = run_ibvp(pa, pb, cfg.boundary, cfg.mode, cfg.friction, gas, T, times, opt);
  } catch (IbvpRegimeError<Scalar> const &e) {
    rep.regime_failure = true;
    rep.note = std::string("perturbed run: ") + e.what();
    return rep;
  }
  auto const reference = run_ibvp(a, b, cfg.boundary, cfg.mode, cfg.friction, gas, T, times, opt);

  rep.distances = orbit_distances(perturbed, reference, rep.T0, cfg.windows);
  rep.raw_distances = window_distances(perturbed, phiP, rep.T0, cfg.windows);
  rep.noise_floor = detail::roundoff_floor(perturbed.steps, std::max(perturbed.max_c0, reference.max_c0));
  rep.monotone_fraction = monotone_fraction(rep.distances, rep.noise_floor);
  try {
    auto const fit = fit_decay(rep.distances, rep.noise_floor);
    rep.xi_hat = fit.xi_hat;
    rep.ratios = fit.ratios;
    rep.fit_points = fit.points;
    rep.pass = fit.xi_hat < 1 && rep.monotone_fraction >= Scalar(0.8);
  } catch (InsufficientDataError const &e) {
    rep.note = e.what();
    rep.trivial = rep.distances.front() <= rep.noise_floor;
    rep.pass = rep.trivial;
    if (rep.trivial) { rep.note = "perturbation at the noise floor: trivial pass"; }
  }
  return rep;
}

template <typename Scalar> StabilityReport<Scalar> run_stability_experiment(StabilityConfig<Scalar> const &cfg)
{
  auto const periodic = solve_periodic(cfg.boundary, cfg.friction, cfg.gas, cfg.grid, cfg.solver);
  return run_stability_experiment(cfg, periodic);
}

template <typename Scalar = double> struct ConvergenceReport
{
  std::vector<Scalar> distances;
  std::optional<Scalar> xi_hat;
  Scalar noise_floor = 0;
};

/// Two compatible perturbations of phi^(P)(0, .) with amplitudes a1 != a2;
/// windowed distance between the two runs and its fitted ratio.
template <typename Scalar>
ConvergenceReport<Scalar> run_uniqueness_experiment(StabilityConfig<Scalar> const &cfg,
                                                    PeriodicSolution<Scalar> const &periodic, Scalar a1, Scalar a2)
{
  auto const &phiP = periodic.field;
  auto const &gas = cfg.gas;
  Scalar const T0 = gas.length * subsonic_check(phiP, gas).nu_max;
  IbvpOptions<Scalar> opt;
  opt.cfl = cfg.cfl;
  opt.dt = detail::window_step(phiP, gas, std::max(std::abs(a1), std::abs(a2)), cfg.cfl);
  auto const [a, b] = profile_at(phiP, Scalar(0));
  auto const [p1, q1] = make_compatible_perturbation(a, b, a1, gas);
  auto const [p2, q2] = make_compatible_perturbation(a, b, a2, gas);
  Scalar const T = Scalar(cfg.windows) * T0;
  auto const times = detail::window_times(T0, cfg.windows);
  auto const x = run_ibvp(p1, q1, cfg.boundary, cfg.mode, cfg.friction, gas, T, times, opt);
  auto const y = run_ibvp(p2, q2, cfg.boundary, cfg.mode, cfg.friction, gas, T, times, opt);
  ConvergenceReport<Scalar> rep;
  rep.distances = orbit_distances(x, y, T0, cfg.windows);
  rep.noise_floor = detail::roundoff_floor(x.steps, std::max(x.max_c0, y.max_c0));
  try {
    rep.xi_hat = fit_decay(rep.distances, rep.noise_floor).xi_hat;
  } catch (InsufficientDataError const &) {
  }
  return rep;
}

} // namespace pipeflow
