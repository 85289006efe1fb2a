#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace sglab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A requested size exceeds a configured memory/compute cap.
class ResourceLimitError : public Error {
 public:
  using Error::Error;
};

/// Vector length does not match the operator dimension.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the domain where the operation is defined
/// (unnormalized state, s outside [0,1], nonpositive trial entries...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Asymptotic parameter choices that do not hold at the requested n.
class ParameterRegimeError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Malformed or inconsistent serialized data.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Iterative eigensolver gave up; carries the best residuals it reached.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> best_residuals)
      : Error(what), best_residuals_(std::move(best_residuals)) {}
  const std::vector<double>& best_residuals() const noexcept { return best_residuals_; }

 private:
  std::vector<double> best_residuals_;
};

/// Adaptive time stepping shrank the step below its floor.
class StepUnderflowError : public Error {
 public:
  StepUnderflowError(const std::string& what, double t) : Error(what), t_(t) {}
  double time() const noexcept { return t_; }

 private:
  double t_;
};

}  // namespace sglab
