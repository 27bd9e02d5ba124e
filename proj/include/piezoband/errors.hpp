#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace piezoband {

/// Malformed or invalid user input: material files, CLI values, bad brackets.
/// The CLI maps this family to exit status 2.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& message, std::string field = {}, int line = 0)
      : std::runtime_error(message), field_(std::move(field)), line_(line) {}

  /// Material-file key or CLI flag the error refers to; empty when unknown.
  const std::string& field() const noexcept { return field_; }
  /// 1-based line in the material file, 0 when not applicable.
  int line() const noexcept { return line_; }

 private:
  std::string field_;
  int line_;
};

/// A layer or cell that violates a physical invariant (positivity, finiteness).
class MaterialError : public InputError {
 public:
  using InputError::InputError;
};

/// Numerical failure: unbracketable root, unexpected pole topology.
/// The CLI maps this family to exit status 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The shunted piezo layer matrix diverges at this frequency.
class PoleError : public NumericalError {
 public:
  explicit PoleError(double omega)
      : NumericalError("unit-cell matrix diverges at omega = " + std::to_string(omega) +
                       " rad/s (shunt resonance)"),
        omega_(omega) {}
  double omega() const noexcept { return omega_; }

 private:
  double omega_;
};

/// A bracket whose end points do not straddle a sign change.
class BracketError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace piezoband
