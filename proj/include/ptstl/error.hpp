#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ptstl {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed formula or template text. `position` is a byte offset into the input.
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& message, std::size_t position)
      : Error(message + " at position " + std::to_string(position)), position_(position) {}
  [[nodiscard]] std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// Input data that does not conform to the dataset format.
class DataError : public Error {
 public:
  DataError(const std::string& file, std::size_t line, const std::string& message)
      : Error(file + ":" + std::to_string(line) + ": " + message), line_(line) {}
  explicit DataError(const std::string& message) : Error(message), line_(0) {}
  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class UnknownVariable : public Error {
 public:
  explicit UnknownVariable(const std::string& name) : Error("unknown variable '" + name + "'") {}
  UnknownVariable(const std::string& name, std::size_t position)
      : Error("unknown variable '" + name + "' at position " + std::to_string(position)) {}
};

/// Interval with a > b, negative bound, or non-integral time bound.
class IntervalError : public Error {
 public:
  using Error::Error;
};

/// Missing, duplicated, or unknown template parameter.
class ParameterError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace ptstl
