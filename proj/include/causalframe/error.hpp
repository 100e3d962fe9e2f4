#pragma once

#include <stdexcept>
#include <string>

namespace causalframe {

// Base for every error raised by the library. The CLI maps each subclass to
// a distinct process exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad parameters or configuration files (exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Input record violates its schema (exit code 3). `line` is 1-based, 0 if
// the error is not tied to a line.
class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string& what, std::size_t line = 0)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Dangling I- tag under strict IOB2 decoding.
class DecodeError : public SchemaError {
 public:
  DecodeError(const std::string& what, std::size_t subtoken_index)
      : SchemaError(what), index_(subtoken_index) {}

  std::size_t subtoken_index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

// Numerically degenerate input to a statistical computation (exit code 4).
class ComputationError : public Error {
 public:
  using Error::Error;
};

}  // namespace causalframe
