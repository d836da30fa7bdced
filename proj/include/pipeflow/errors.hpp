#pragma once

#include <stdexcept>
#include <string>

namespace pipeflow {

// Invalid argument: non-positive density, x outside the pipe, bad parameters.
struct DomainError : std::domain_error
{
  using std::domain_error::domain_error;
};

// c = 0 or a characteristic speed vanished; the hyperbolic structure is lost.
struct SonicError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

// Caller violated a documented precondition (CFL, trajectory too short, ...).
struct PreconditionError : std::logic_error
{
  using std::logic_error::logic_error;
};

// The computation left the subsonic small-amplitude regime.
struct RegimeError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

// A NaN/inf appeared in an integrator.
struct NumericError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

struct InsufficientDataError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

} // namespace pipeflow
