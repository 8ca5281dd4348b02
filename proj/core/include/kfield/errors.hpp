#pragma once

#include <stdexcept>
#include <string>

namespace kfield {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// g00 left the open interval (eps, 1-eps), or a field was evaluated
// outside its classically allowed region.
struct DomainError : Error {
  using Error::Error;
};

// A gradient or field evaluation produced NaN/Inf.
struct NonFiniteError : Error {
  using Error::Error;
};

// The log-ratio torsion diverges as g00 -> 0 (v -> 0) or g00 -> 1 (v -> c).
struct SingularTorsionError : Error {
  using Error::Error;
};

// |v| >= c reached during integration.
struct SuperluminalError : Error {
  using Error::Error;
};

// Integrator produced a non-finite state.
struct StepError : Error {
  using Error::Error;
};

// Explicit wave stepping with a time step above the CFL bound.
struct StabilityError : Error {
  using Error::Error;
};

struct ParseError : Error {
  using Error::Error;
};

struct SchemaError : Error {
  using Error::Error;
};

struct MismatchError : Error {
  using Error::Error;
};

}  // namespace kfield
