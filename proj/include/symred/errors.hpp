#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace symred {

/// Input shapes do not fit together (odd dimensions, length mismatch, ...).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Base of every failure caused by the numbers rather than by the caller.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Symplectic Gram-Schmidt produced a (numerically) zero vector.
class DegenerateVector : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// SQR hit |Omega(q, p)| below threshold.
class RankDeficient : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// DEIM selection reached a residual that vanishes; `column` is 0-based.
class ZeroResidual : public NumericalError {
 public:
  ZeroResidual(const std::string& what, std::size_t column)
      : NumericalError(what), column_(column) {}
  std::size_t column() const { return column_; }

 private:
  std::size_t column_;
};

class NewtonDivergence : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Every candidate snapshot of a greedy iteration was already in span.
class StagnationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A basis failed its symplecticity or orthonormality check.
class SymplecticityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Time integration produced a non-finite state at `step`.
class NonFiniteState : public NumericalError {
 public:
  NonFiniteState(const std::string& what, std::size_t step)
      : NumericalError(what), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

/// Malformed experiment configuration or missing input artifact.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace symred
