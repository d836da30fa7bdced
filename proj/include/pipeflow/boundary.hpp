#pragma once

#include <algorithm>

#include "series.hpp"

namespace pipeflow {

/// P-periodic boundary data in perturbation form: phi2 is prescribed at x = 0,
/// phi1 at x = L. `eps` is the amplitude scale the series was built with.
template <typename Scalar = double> struct BoundaryData
{
  TrigSeries<Scalar> phi1b;
  TrigSeries<Scalar> phi2b;
  Scalar eps{0};

  Scalar phi1(Scalar t, Scalar period) const { return phi1b.value(t, period); }
  Scalar phi2(Scalar t, Scalar period) const { return phi2b.value(t, period); }

  static BoundaryData zero() { return {}; }

  /// eps * shape for both components.
  static BoundaryData from_shape(TrigSeries<Scalar> const &shape1, TrigSeries<Scalar> const &shape2, Scalar eps)
  {
    return {shape1.scaled(eps), shape2.scaled(eps), eps};
  }
};

template <typename Scalar = double> struct BoundaryValidation
{
  Scalar periodicity_residual = 0;
  Scalar c0_norm = 0;
  Scalar c1_norm = 0; // max(sup |phi_ib|, sup |phi_ib'|) over both components

  bool pass(Scalar c1_claimed) const { return periodicity_residual <= Scalar(1e-12) && c1_norm <= c1_claimed; }
};

template <typename Scalar>
BoundaryValidation<Scalar> validate_boundary(BoundaryData<Scalar> const &bd, Scalar period, Index n_samples = 4096)
{
  BoundaryValidation<Scalar> rep;
  for (Index i = 0; i < n_samples; ++i) {
    Scalar const t = period * Scalar(i) / Scalar(n_samples);
    for (auto const *s : {&bd.phi1b, &bd.phi2b}) {
      Scalar const v = s->value(t, period);
      rep.periodicity_residual = std::max(rep.periodicity_residual, std::abs(s->value(t + period, period) - v));
      rep.c0_norm = std::max(rep.c0_norm, std::abs(v));
      rep.c1_norm = std::max({rep.c1_norm, std::abs(v), std::abs(s->derivative(t, period))});
    }
  }
  return rep;
}

} // namespace pipeflow
