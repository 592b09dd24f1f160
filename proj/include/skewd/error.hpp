#pragma once

#include <stdexcept>
#include <string>

namespace skewd {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A distribution or model parameter violates its invariants.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Vector/matrix sizes do not line up.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Inputs carry no information (constant vectors, too few distinct points).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// A configuration value is out of range or inconsistent with the data.
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// An optimizer or fit was handed an unusable starting point.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Malformed external data (CSV, JSON). Carries the offending line if known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, long line = -1)
      : Error(line >= 0 ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

}  // namespace skewd
