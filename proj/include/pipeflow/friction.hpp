#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "model.hpp"
#include "series.hpp"

namespace pipeflow {

enum class FrictionKind
{
  constant,
  trig_series
};

/// One term (a cos(2 pi j t / P) + b sin(2 pi j t / P)) x^k of a friction series.
template <typename Scalar = double> struct FrictionTerm
{
  int harmonic = 0; // j
  int power = 0;    // k, at most 2
  Scalar cos_coef = 0;
  Scalar sin_coef = 0;
};

/// Friction coefficient beta(t, x), P-periodic in t and polynomial (degree <= 2) in x.
template <typename Scalar = double> struct FrictionSpec
{
  FrictionKind kind = FrictionKind::constant;
  Scalar value = 0; // constant kind
  std::vector<FrictionTerm<Scalar>> terms;
  Scalar c0_claimed = 0;

  static FrictionSpec constant(Scalar b0) { return {FrictionKind::constant, b0, {}, std::abs(b0)}; }

  static FrictionSpec series(std::vector<FrictionTerm<Scalar>> terms, Scalar c0)
  {
    return {FrictionKind::trig_series, 0, std::move(terms), c0};
  }

  bool is_constant() const { return kind == FrictionKind::constant; }
};

// Unchecked evaluation for inner loops; x is assumed to lie in [0, L].
template <typename Scalar> Scalar beta_at(FrictionSpec<Scalar> const &spec, Scalar period, Scalar t, Scalar x)
{
  if (spec.is_constant()) { return spec.value; }
  Scalar const w = 2 * std::numbers::pi_v<Scalar> * wrap_time(t, period) / period;
  Scalar b = 0;
  for (auto const &term : spec.terms) {
    Scalar const xk = term.power == 0 ? Scalar(1) : term.power == 1 ? x : x * x;
    Scalar const tj = term.harmonic == 0 ? term.cos_coef
                                         : term.cos_coef * std::cos(term.harmonic * w) +
                                             term.sin_coef * std::sin(term.harmonic * w);
    b += tj * xk;
  }
  return b;
}

template <typename Scalar>
Scalar eval_beta(FrictionSpec<Scalar> const &spec, GasParams<Scalar> const &p, Scalar t, Scalar x)
{
  if (!(x >= 0 && x <= p.length)) { throw DomainError("friction evaluated outside [0, L]"); }
  return beta_at(spec, p.period, t, x);
}

template <typename Scalar = double> struct FrictionValidation
{
  Scalar max_abs = 0;
  Scalar max_dt = 0;
  Scalar max_dx = 0;
  Scalar periodicity_residual = 0;
  Scalar c1_norm = 0; // max of the three sampled sups
  Scalar c0_claimed = 0;

  bool pass() const { return periodicity_residual <= Scalar(1e-12) && c1_norm <= c0_claimed; }
};

/// Samples beta on an n_samples x n_samples grid of [0, P) x [0, L] and checks
/// periodicity and the claimed C1 bound. Derivatives by central differences
/// with h = P / 4096 (one-sided in x at the pipe ends).
template <typename Scalar>
FrictionValidation<Scalar> validate_beta(FrictionSpec<Scalar> const &spec, GasParams<Scalar> const &p, Index n_samples)
{
  if (n_samples < 16) { throw PreconditionError("validate_beta needs at least 16 samples per axis"); }
  for (auto const &term : spec.terms) {
    if (term.power < 0 || term.power > 2 || term.harmonic < 0) {
      throw DomainError("friction terms need harmonic >= 0 and x-power in {0, 1, 2}");
    }
  }
  FrictionValidation<Scalar> rep;
  rep.c0_claimed = spec.c0_claimed;
  Scalar const P = p.period;
  Scalar const L = p.length;
  Scalar const ht = P / 4096;
  Scalar const hx = L / 4096;
  for (Index i = 0; i < n_samples; ++i) {
    Scalar const t = P * Scalar(i) / Scalar(n_samples);
    for (Index k = 0; k < n_samples; ++k) {
      Scalar const x = L * Scalar(k) / Scalar(n_samples - 1);
      Scalar const b = eval_beta(spec, p, t, x);
      rep.max_abs = std::max(rep.max_abs, std::abs(b));
      rep.periodicity_residual = std::max(rep.periodicity_residual, std::abs(eval_beta(spec, p, t + P, x) - b));
      Scalar const dbt = (eval_beta(spec, p, t + ht, x) - eval_beta(spec, p, t - ht, x)) / (2 * ht);
      Scalar const xl = std::max(Scalar(0), x - hx);
      Scalar const xr = std::min(L, x + hx);
      Scalar const dbx = (eval_beta(spec, p, t, xr) - eval_beta(spec, p, t, xl)) / (xr - xl);
      rep.max_dt = std::max(rep.max_dt, std::abs(dbt));
      rep.max_dx = std::max(rep.max_dx, std::abs(dbx));
    }
  }
  rep.c1_norm = std::max({rep.max_abs, rep.max_dt, rep.max_dx});
  return rep;
}

} // namespace pipeflow
