#pragma once

#include <algorithm>
#include <array>
#include <limits>
#include <thread>
#include <vector>

#include "boundary.hpp"
#include "characteristics.hpp"

namespace pipeflow {

template <typename Scalar = double> struct SolverReport
{
  int iterations = 0;
  std::vector<Scalar> sup_diffs;  // sup_diffs[l-1] = |phi^(l) - phi^(l-1)|_C0
  std::vector<Scalar> kappa_hats; // kappa_hats[i] = sup_diffs[i+1] / sup_diffs[i], i.e. l >= 2
  Scalar c0_norm = 0;
  Scalar c1_norm_fd = 0;
  Scalar nu_max = 0;
  Scalar T0 = 0;
  Scalar tol_fp = 0;
  bool converged = false;
  std::string failure; // empty unless the run left the subsonic regime or stalled
};

struct GridSize
{
  Index nt = 256;
  Index nx = 256;
};

template <typename Scalar = double> struct PeriodicOptions
{
  Scalar tol_fp = Scalar(1e-10);
  int max_iter = 100;
  int threads = 1;
};

/// Raised when the fixed-point iteration does not settle; carries the full history.
template <typename Scalar = double> struct NonConvergenceError : RegimeError
{
  SolverReport<Scalar> report;
  NonConvergenceError(std::string const &what, SolverReport<Scalar> rep) : RegimeError(what), report(std::move(rep)) {}
};

/// One linearized problem: every node takes the boundary value where its
/// characteristic (frozen in `prev`) leaves the pipe plus the friction
/// integral along the way. Nodes are independent; `threads` splits columns.
template <typename Scalar>
PeriodicField<Scalar> linearized_sweep(PeriodicField<Scalar> const &prev, BoundaryData<Scalar> const &bd,
                                       FrictionSpec<Scalar> const &friction, GasParams<Scalar> const &gas,
                                       int threads = 1)
{
  auto const check = subsonic_check(prev, gas);
  if (!check.pass()) { throw SonicError("linearized_sweep: background field is not subsonic"); }
  CharTracer<Scalar> const tracer(prev, gas, friction);
  PeriodicField<Scalar> next(prev.nt, prev.nx, prev.period, prev.length);
  Scalar const P = prev.period;

  auto columns = [&](Index k_begin, Index k_end) {
    constexpr int width = CharTracer<Scalar>::batch_width;
    std::array<typename CharTracer<Scalar>::Landing, width> l1, l2;
    for (Index k = k_begin; k < k_end; ++k) {
      for (Index j = 0; j < prev.nt; j += width) {
        int const count = int(std::min<Index>(width, prev.nt - j));
        tracer.transport_batch(1, j, count, k, l1.data());
        tracer.transport_batch(2, j, count, k, l2.data());
        for (int b = 0; b < count; ++b) {
          next.phi1(j + b, k) = bd.phi1(l1[b].t, P) + l1[b].integral;
          next.phi2(j + b, k) = bd.phi2(l2[b].t, P) + l2[b].integral;
        }
      }
    }
  };

  Index const workers = std::clamp<Index>(threads, 1, prev.nx);
  if (workers == 1) {
    columns(0, prev.nx);
  } else {
    std::vector<std::exception_ptr> errors(std::size_t(workers), nullptr);
    {
      std::vector<std::jthread> pool;
      for (Index w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          try {
            columns(w * prev.nx / workers, (w + 1) * prev.nx / workers);
          } catch (...) {
            errors[std::size_t(w)] = std::current_exception();
          }
        });
      }
    }
    for (auto const &e : errors) {
      if (e) { std::rethrow_exception(e); }
    }
  }
  return next;
}

template <typename Scalar = double> struct PeriodicSolution
{
  PeriodicField<Scalar> field;
  SolverReport<Scalar> report;
};

/// Iterates linearized_sweep from phi^(0) = 0 until successive iterates differ
/// by at most tol_fp in the discrete C0 norm.
template <typename Scalar>
PeriodicSolution<Scalar> solve_periodic(BoundaryData<Scalar> const &bd, FrictionSpec<Scalar> const &friction,
                                        GasParams<Scalar> const &gas, GridSize grid,
                                        PeriodicOptions<Scalar> const &opt = {})
{
  validate(gas);
  if (grid.nt < 16 || grid.nx < 16) { throw PreconditionError("solve_periodic needs nt, nx >= 16"); }
  if (!(opt.tol_fp > 0)) { throw PreconditionError("tol_fp must be positive"); }

  SolverReport<Scalar> rep;
  rep.tol_fp = opt.tol_fp;
  PeriodicField<Scalar> current(grid.nt, grid.nx, gas.period, gas.length);
  for (int l = 1; l <= opt.max_iter; ++l) {
    PeriodicField<Scalar> next;
    try {
      next = linearized_sweep(current, bd, friction, gas, opt.threads);
    } catch (SonicError const &e) {
      rep.failure = e.what();
      throw NonConvergenceError<Scalar>("iterate " + std::to_string(l) + " left the subsonic regime", rep);
    }
    Scalar const diff = sup_distance(next, current);
    rep.iterations = l;
    rep.sup_diffs.push_back(diff);
    if (rep.sup_diffs.size() >= 2) { rep.kappa_hats.push_back(diff / rep.sup_diffs[rep.sup_diffs.size() - 2]); }
    current = std::move(next);
    if (!std::isfinite(diff)) {
      rep.failure = "non-finite iterate";
      throw NonConvergenceError<Scalar>("iteration produced non-finite values", rep);
    }
    auto const check = subsonic_check(current, gas);
    if (!check.pass()) {
      rep.failure = "iterate " + std::to_string(l) + " fails the subsonic check";
      throw NonConvergenceError<Scalar>(rep.failure, rep);
    }
    if (diff <= opt.tol_fp) {
      rep.converged = true;
      rep.nu_max = check.nu_max;
      break;
    }
  }
  rep.c0_norm = c0_norm(current);
  rep.c1_norm_fd = c1_norm_estimate(current);
  if (!rep.converged) {
    rep.failure = "max_iter reached";
    throw NonConvergenceError<Scalar>("no convergence after " + std::to_string(opt.max_iter) + " sweeps", rep);
  }
  rep.T0 = gas.length * rep.nu_max;
  return {std::move(current), std::move(rep)};
}

/// Profile phi^(P)(t, .) on the field's x nodes (linear in t between rows).
template <typename Scalar>
std::pair<ArrayX<Scalar>, ArrayX<Scalar>> profile_at(PeriodicField<Scalar> const &f, Scalar t)
{
  auto const tc = locate_time(t, f.period, f.nt);
  ArrayX<Scalar> a = (1 - tc.w) * f.phi1.row(tc.j0).transpose() + tc.w * f.phi1.row(tc.j1).transpose();
  ArrayX<Scalar> b = (1 - tc.w) * f.phi2.row(tc.j0).transpose() + tc.w * f.phi2.row(tc.j1).transpose();
  return {std::move(a), std::move(b)};
}

} // namespace pipeflow
