#pragma once

#include <stdexcept>
#include <string>

namespace sheetgame {

// Invalid configuration values (grid, parameters, config files).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller passed an index or point outside the valid domain.
class UsageError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// An input violates a documented precondition (e.g. non-adapted integrand).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// NaN or overflow while evaluating a scheme.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A fixed-point or Picard iteration failed to reach its tolerance.
class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, double residual)
      : NumericalError(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// The model lies outside the class a solver supports.
class UnsupportedModel : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace sheetgame
