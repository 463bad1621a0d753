#pragma once

#include <stdexcept>
#include <string>

namespace psrsel {

// Base class for all domain errors raised by this library.
struct PsrError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// make_builtin received a name outside the supported set.
struct UnknownEnvironment : PsrError {
  using PsrError::PsrError;
};

// A conditional probability was requested given an event of probability zero.
struct UndefinedConditional : PsrError {
  using PsrError::PsrError;
};

// An empirical estimate has a zero denominator for a basis history.
struct InsufficientData : PsrError {
  using PsrError::PsrError;
};

// Inputs whose shapes or index ranges do not line up.
struct DimensionMismatch : PsrError {
  using PsrError::PsrError;
};

// The candidate test pool is too small for the requested sample.
struct InsufficientCandidates : PsrError {
  using PsrError::PsrError;
};

// A clustered MDP with no supported transition row.
struct EmptyMdp : PsrError {
  using PsrError::PsrError;
};

// Experiment configuration errors; message carries file:line context.
struct ConfigError : PsrError {
  using PsrError::PsrError;
};

// Filter update whose normalizer magnitude fell below the floor.  Carries
// the offending normalizer so callers can still report the raw value.
struct DegenerateUpdate : PsrError {
  double normalizer;
  explicit DegenerateUpdate(double z)
      : PsrError("degenerate filter update: normalizer " + std::to_string(z)),
        normalizer(z) {}
};

}  // namespace psrsel
