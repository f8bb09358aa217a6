#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lmd {

// Base for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A documented precondition of an operation was violated by the caller.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// An enumeration or expansion would exceed the configured cell budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

// Asymptotic regime assumption (f + g < a) does not hold.
class RegimeError : public Error {
 public:
  using Error::Error;
};

// An internal invariant that a construction guarantees was found broken.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t position, const std::string& what)
      : Error("parse error at offset " + std::to_string(position) + ": " + what),
        position_(position) {}

  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

}  // namespace lmd
