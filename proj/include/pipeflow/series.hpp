#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "model.hpp"

namespace pipeflow {

/// Maps t into [0, period).
template <typename Scalar> Scalar wrap_time(Scalar t, Scalar period)
{
  Scalar w = t - period * std::floor(t / period);
  if (w >= period) { w -= period; }
  if (w < 0) { w = 0; }
  return w;
}

/// mean + sum_j cos_coef[j-1] cos(2 pi j t / P) + sin_coef[j-1] sin(2 pi j t / P)
template <typename Scalar = double> struct TrigSeries
{
  Scalar mean{0};
  std::vector<Scalar> cos_coef;
  std::vector<Scalar> sin_coef;

  Index harmonics() const { return Index(std::max(cos_coef.size(), sin_coef.size())); }

  Scalar value(Scalar t, Scalar period) const
  {
    Scalar const w = 2 * std::numbers::pi_v<Scalar> * wrap_time(t, period) / period;
    Scalar v = mean;
    for (Index j = 1; j <= harmonics(); ++j) {
      v += coef(cos_coef, j) * std::cos(Scalar(j) * w) + coef(sin_coef, j) * std::sin(Scalar(j) * w);
    }
    return v;
  }

  Scalar derivative(Scalar t, Scalar period) const
  {
    Scalar const k = 2 * std::numbers::pi_v<Scalar> / period;
    Scalar const w = k * wrap_time(t, period);
    Scalar v = 0;
    for (Index j = 1; j <= harmonics(); ++j) {
      v += Scalar(j) * k * (coef(sin_coef, j) * std::cos(Scalar(j) * w) - coef(cos_coef, j) * std::sin(Scalar(j) * w));
    }
    return v;
  }

  TrigSeries scaled(Scalar s) const
  {
    TrigSeries out = *this;
    out.mean *= s;
    for (auto &c : out.cos_coef) { c *= s; }
    for (auto &c : out.sin_coef) { c *= s; }
    return out;
  }

private:
  static Scalar coef(std::vector<Scalar> const &v, Index j) { return j <= Index(v.size()) ? v[j - 1] : Scalar(0); }
};

} // namespace pipeflow
