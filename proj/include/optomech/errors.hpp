#pragma once

#include <stdexcept>
#include <string>

namespace optomech {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fock cutoff too small for the requested state or operator.
class CutoffError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the accepted domain, or a state failing its invariants.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Parameters outside the weak-coupling / pulsed regime the model assumes.
class RegimeError : public Error {
 public:
  using Error::Error;
};

/// Drift matrix with an eigenvalue of non-negative real part.
class InstabilityError : public Error {
 public:
  using Error::Error;
};

/// Conditioning on an outcome whose probability is numerically zero.
class ZeroProbabilityError : public Error {
 public:
  using Error::Error;
};

/// Wigner grid does not contain the state (boundary values too large).
class GridError : public Error {
 public:
  using Error::Error;
};

/// A grid or cutoff refinement moved a reported scalar beyond tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace optomech
