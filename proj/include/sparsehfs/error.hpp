#pragma once

#include <stdexcept>
#include <string>

namespace shfs {

// Bad input: malformed files, violated preconditions, out-of-range parameters.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical routine could not deliver its contract (singular system,
// non-convergence, disconnected graph where connectivity is required).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DisconnectedGraphError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SolveError : public NumericalError {
 public:
  SolveError(const std::string& what, double residual)
      : NumericalError(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

}  // namespace shfs
