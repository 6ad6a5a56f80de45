#pragma once

#include <stdexcept>
#include <string>

namespace fhn {

// Bad input to an operation: mismatched grids, non-finite values, invalid shapes.
class InvalidArgument : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// A configuration or parameter set violates a module invariant. `key()` names
// the offending field (e.g. "beta").
class ValidationError : public std::runtime_error {
public:
  ValidationError(std::string key, const std::string& what)
      : std::runtime_error(what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

private:
  std::string key_;
};

// Config file could not be parsed.
class ParseError : public std::runtime_error {
public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error(what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

// Base for every failure of the numerics (exit code 3 in the CLI).
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// The exponential weight e^x would overflow on the current grid.
class DomainTruncationError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

// A linear solve did not reach the residual contract.
class SolverFailure : public NumericalError {
public:
  SolverFailure(double residual, const std::string& what)
      : NumericalError(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

private:
  double residual_;
};

class NewtonFailure : public NumericalError {
public:
  NewtonFailure(double time, int iterations, double update_norm, const std::string& what)
      : NumericalError(what), time_(time), iterations_(iterations), update_norm_(update_norm) {}
  double time() const noexcept { return time_; }
  int iterations() const noexcept { return iterations_; }
  double update_norm() const noexcept { return update_norm_; }

private:
  double time_;
  int iterations_;
  double update_norm_;
};

// Non-finite values appeared during time stepping.
class BlowUp : public NumericalError {
public:
  BlowUp(double time, const std::string& what) : NumericalError(what), time_(time) {}
  double time() const noexcept { return time_; }

private:
  double time_;
};

// The J values at the two ends of a root bracket no longer differ in sign.
class BracketLost : public NumericalError {
public:
  BracketLost(double c_lo, double J_lo, double c_hi, double J_hi, const std::string& what)
      : NumericalError(what), c_lo_(c_lo), J_lo_(J_lo), c_hi_(c_hi), J_hi_(J_hi) {}
  double c_lo() const noexcept { return c_lo_; }
  double J_lo() const noexcept { return J_lo_; }
  double c_hi() const noexcept { return c_hi_; }
  double J_hi() const noexcept { return J_hi_; }

private:
  double c_lo_, J_lo_, c_hi_, J_hi_;
};

// Checkpoint file is malformed (version, length or payload problem).
class CheckpointError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace fhn
