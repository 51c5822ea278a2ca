#pragma once

#include <stdexcept>
#include <string>

namespace nlb {

/// Base of every error raised by the library. The CLI maps the concrete
/// subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (|x| >= 1 for the
/// weight, alpha outside (0,2), gamma outside (0,1/2), ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Objects living on different meshes or with incompatible sizes.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Quadrature or eigen-solver failed to meet its accuracy contract.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Non-finite or exploding state during time stepping.
class BlowUpError : public Error {
 public:
  BlowUpError(const std::string& what, double t, double norm)
      : Error(what), time_(t), norm_(norm) {}
  double time() const { return time_; }
  double norm() const { return norm_; }

 private:
  double time_;
  double norm_;
};

/// Malformed or out-of-range configuration. `line` is 0 when not tied to a
/// specific line of the input text.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace nlb
