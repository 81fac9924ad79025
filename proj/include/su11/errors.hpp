#pragma once

#include <stdexcept>
#include <string>

namespace su11 {

/// Base class of all library errors.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
  public:
    using Error::Error;
};

/// Invalid or inconsistent configuration input.
class ConfigError : public Error {
  public:
    using Error::Error;
};

/// A0(t) == A1(t) encountered, so the effective mass is undefined.
class SingularMError : public Error {
  public:
    using Error::Error;
};

/// Step-size underflow or step budget exhausted in the ODE solver.
class IntegrationError : public Error {
  public:
    using Error::Error;
};

/// A grid is too coarse or a requested time is not on the grid.
class GridError : public Error {
  public:
    using Error::Error;
};

/// A structural invariant (pseudo-unitarity, |xi|<1, Omega>0, ...) is violated.
class InvariantError : public Error {
  public:
    using Error::Error;
};

/// Operation applied outside its stated preconditions.
class UsageError : public Error {
  public:
    using Error::Error;
};

/// A pole of a hypergeometric parameter was hit inside the terminating range.
class PoleError : public Error {
  public:
    using Error::Error;
};

/// A formula is not applicable at this point (caller should fall back).
class NotApplicableError : public Error {
  public:
    using Error::Error;
};

/// An infinite series failed to converge within its term budget.
class ConvergenceError : public Error {
  public:
    using Error::Error;
};

/// Adaptive quadrature failed to reach the requested tolerance.
class QuadratureError : public Error {
  public:
    using Error::Error;
};

/// A finite-difference check failed to converge under refinement.
class NumericsError : public Error {
  public:
    using Error::Error;
};

/// File-system failure while reading or writing artifacts.
class IoError : public Error {
  public:
    using Error::Error;
};

} // namespace su11
