#pragma once

#include <stdexcept>
#include <string>

namespace jcgrav {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad arguments or a violated type invariant.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The Fock truncation does not hold enough of the coherent-state mass.
class TruncationError : public Error {
 public:
  TruncationError(const std::string& what, double captured_mass)
      : Error(what), captured_mass_(captured_mass) {}
  double captured_mass() const noexcept { return captured_mass_; }

 private:
  double captured_mass_;
};

/// exp(-z^2) left the double range.
class OverflowError : public Error {
 public:
  using Error::Error;
};

/// Adaptive quadrature ran out of panels before meeting its tolerance.
class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, double achieved_error)
      : Error(what), achieved_error_(achieved_error) {}
  double achieved_error() const noexcept { return achieved_error_; }

 private:
  double achieved_error_;
};

/// The ODE integrator could not continue (step underflow or step budget).
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, double achieved_time)
      : Error(what), achieved_time_(achieved_time) {}
  double achieved_time() const noexcept { return achieved_time_; }

 private:
  double achieved_time_;
};

/// Overlaps that cannot come from a normalized state.
class InconsistentStateError : public Error {
 public:
  using Error::Error;
};

/// Scenario text could not be parsed. Line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, int line, int column)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

/// A parsed scenario breaks one of its invariants.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace jcgrav
