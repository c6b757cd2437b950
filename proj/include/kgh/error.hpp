#pragma once

#include <stdexcept>
#include <string>

namespace kgh {

// Base of every error raised by the library. The CLI maps the concrete type
// onto an exit status (configuration vs runtime/numerical failure).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke a documented precondition (wrong representation, grid
// mismatch, interval outside a trajectory, ...).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// A parameter lies outside the range a theorem or a discretization allows.
class RangeError : public Error {
 public:
  using Error::Error;
};

// Something the numerics promised did not hold (imaginary residue of a real
// convolution, non-finite values, ...).
class NumericalError : public Error {
 public:
  using Error::Error;
};

class IntegrationFailure : public NumericalError {
 public:
  IntegrationFailure(const std::string& what, double last_valid_time)
      : NumericalError(what), last_valid_time_(last_valid_time) {}
  double last_valid_time() const { return last_valid_time_; }

 private:
  double last_valid_time_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace kgh
