#pragma once

#include <cmath>
#include <vector>

#include "fvm.hpp"
#include "periodic_solver.hpp"

namespace pipeflow {

/// Runs the finite-volume oracle from the rest state for `settle` time units
/// under the same boundary data and compares it with phi^(P)(settle, .).
template <typename Scalar>
fvm::FieldDiscrepancy<Scalar> oracle_discrepancy(PeriodicField<Scalar> const &phiP, BoundaryData<Scalar> const &bd,
                                                 FrictionSpec<Scalar> const &friction, GasParams<Scalar> const &gas,
                                                 Index cells, Scalar settle, Scalar cfl = Scalar(0.9))
{
  auto rest = fvm::cells_from_perturbation(cells, gas, [](Scalar) { return std::pair<Scalar, Scalar>{0, 0}; });
  auto const end = fvm::run_fvm(rest, bd, friction, gas, settle, cfl);
  auto const [a, b] = profile_at(phiP, settle);
  return fvm::compare_fields(a, b, end, gas);
}

/// log2(e_i / e_{i+1}) for a ladder of errors on grids refined by 2.
template <typename Scalar> std::vector<Scalar> observed_orders(std::vector<Scalar> const &errors)
{
  std::vector<Scalar> out;
  for (std::size_t i = 0; i + 1 < errors.size(); ++i) { out.push_back(std::log2(errors[i] / errors[i + 1])); }
  return out;
}

} // namespace pipeflow
