#pragma once

#include <stdexcept>
#include <string>

namespace nsode {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A pivot fell below the singularity tolerance; usually (I - gamma*tau*J)
/// is not invertible at the current step size.
class SingularMatrix : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A vector field was asked for a value outside its domain of definition.
class DomainViolation : public Error {
 public:
  using Error::Error;
};

class NonFiniteValue : public Error {
 public:
  using Error::Error;
};

class MissingDerivative : public Error {
 public:
  using Error::Error;
};

/// The slow-manifold map g0 does not satisfy g(y, g0(y)) = 0.
class ResidualTooLarge : public Error {
 public:
  using Error::Error;
};

/// The event function does not change sign over the requested interval.
class NoBracket : public Error {
 public:
  using Error::Error;
};

class MaxIterations : public Error {
 public:
  using Error::Error;
};

class NotOrthogonal : public Error {
 public:
  using Error::Error;
};

/// Bad caller input: unknown builtin, out-of-range parameter, broken precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Requested event-free horizon (reference solutions need at least one event).
class NoEventBeforeHorizon : public Error {
 public:
  using Error::Error;
};

}  // namespace nsode
