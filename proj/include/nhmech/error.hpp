#pragma once

#include <stdexcept>
#include <string>

namespace nhmech {

/* Error hierarchy shared across the library. The CLI maps these to its
   exit-code contract: ConfigError/DomainError -> 2, NumericalError -> 3. */

class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class DimensionError : public Error {
public:
  using Error::Error;
};

/* Lagrangian Hessian in the velocities is singular or ill-conditioned
   at the queried state. */
class RegularityError : public Error {
public:
  using Error::Error;
};

/* The multiplier system (compatibility matrix) is singular. */
class CompatibilityError : public Error {
public:
  using Error::Error;
};

/* Input state violates a mathematical precondition, e.g. lies off the
   constraint submanifold. */
class DomainError : public Error {
public:
  using Error::Error;
};

/* Missing or inconsistent configuration: unknown system, absent quotient
   data, bad parameter values. */
class ConfigError : public Error {
public:
  using Error::Error;
};

/* Operation not supported for this system type (e.g. Hamiltonian-side
   calls on a non-mechanical Lagrangian). */
class UnsupportedError : public Error {
public:
  using Error::Error;
};

/* Failure during iteration; carries the step index at which it occurred. */
class NumericalError : public Error {
public:
  NumericalError(const std::string& msg, long step)
      : Error(msg + " (step " + std::to_string(step) + ")"), step_(step) {}
  long step() const { return step_; }

private:
  long step_;
};

}  // namespace nhmech
