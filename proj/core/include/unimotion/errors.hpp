#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace unimotion {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A vector, matrix or grid has the wrong extent.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Input values violate a documented precondition (NaN, bad range, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A rotation parameterization cannot be orthonormalized.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// Caller broke an operation contract (wrong mask convention, nothing to attend to, ...).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Unknown dataset tag.
class RegistryError : public Error {
 public:
  using Error::Error;
};

/// Sequence too short for the requested operation.
class LengthError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. Carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace unimotion
