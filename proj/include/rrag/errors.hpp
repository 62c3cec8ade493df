#pragma once

#include <stdexcept>
#include <string>

namespace rrag {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define RRAG_DEFINE_ERROR(Name)        \
  class Name : public Error {          \
   public:                             \
    using Error::Error;                \
  }

// linalg
RRAG_DEFINE_ERROR(NonConvergence);
// closed forms
RRAG_DEFINE_ERROR(Overflow);
RRAG_DEFINE_ERROR(OutOfTable);
// Monte Carlo
RRAG_DEFINE_ERROR(DegenerateExcess);
// root counting
RRAG_DEFINE_ERROR(IdenticallyZero);
// curve tracing and Morse extraction
RRAG_DEFINE_ERROR(MeshTooCoarse);
RRAG_DEFINE_ERROR(NewtonStall);
RRAG_DEFINE_ERROR(PairingFailure);
RRAG_DEFINE_ERROR(PlateauDetected);
RRAG_DEFINE_ERROR(DegenerateSample);
// statistics
RRAG_DEFINE_ERROR(SparseBins);
RRAG_DEFINE_ERROR(ZeroStderr);

#undef RRAG_DEFINE_ERROR

}  // namespace rrag
