#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace greenlb {

/// Base class for every error raised by the library. `kind()` is a short
/// stable tag used by the CLI for its one-line error output.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept = 0;
};

/// Malformed policy text. Line and column are 1-based.
class ParseError final : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column);

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  const char* kind() const noexcept override { return "parse"; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Arithmetic failure while evaluating a policy (division or mod by zero).
class EvalError final : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "eval"; }
};

/// Invalid or incomplete configuration.
class ConfigError final : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "config"; }
};

/// Not enough data for a requested statistic.
class InsufficientDataError final : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "insufficient-data"; }
};

/// Inconsistent input to the replay oracle or a results table.
class DataError final : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "data"; }
};

/// An internal invariant of the simulator was violated.
class LogicError final : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "logic"; }
};

}  // namespace greenlb
