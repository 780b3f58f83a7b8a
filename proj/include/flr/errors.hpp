#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace flr {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad dimensions, bad parameters, unreadable files.
class InputError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public InputError {
 public:
  DimensionMismatch(std::size_t lhs, std::size_t rhs);
  std::size_t lhs() const noexcept { return lhs_; }
  std::size_t rhs() const noexcept { return rhs_; }

 private:
  std::size_t lhs_;
  std::size_t rhs_;
};

class DomainError : public InputError {
 public:
  using InputError::InputError;
};

class ConfigError : public InputError {
 public:
  using InputError::InputError;
};

/// Something went wrong numerically: empty neighbourhoods, singular systems,
/// solver failures.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// No observation falls in the kernel support around x0.
class EmptyNeighborhood : public NumericalError {
 public:
  EmptyNeighborhood(double h, double nearest);
  /// Smallest ||X_i - x0||; any bandwidth at or above it is non-empty.
  double nearest_distance() const noexcept { return nearest_; }

 private:
  double nearest_;
};

class DegenerateDenominator : public NumericalError {
 public:
  explicit DegenerateDenominator(double weight_sum);
  double weight_sum() const noexcept { return weight_sum_; }

 private:
  double weight_sum_;
};

class DegenerateTruncation : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DegenerateOperator : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NumericalSingularity : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NonConvergence : public NumericalError {
 public:
  NonConvergence(int sweeps, double off_diagonal);
  int sweeps() const noexcept { return sweeps_; }

 private:
  int sweeps_;
};

class NoRoot : public NumericalError {
 public:
  NoRoot(double lo, double f_lo, double hi, double f_hi);
};

class SelectionFailed : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class FitError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace flr
