#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace premlog {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Program-level semantic errors: arity conflicts, unsafe rules, aggregates
/// in recursion without a push marker, rewrite preconditions.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class LoadError : public Error {
 public:
  LoadError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class IterationCapExceeded : public Error {
 public:
  explicit IterationCapExceeded(std::size_t cap);
  std::size_t cap() const { return cap_; }

 private:
  std::size_t cap_;
};

class ArithmeticOverflow : public Error {
 public:
  using Error::Error;
};

/// A protocol or plan invariant failed at run time (disjointness, staleness,
/// gamma-cover, union equivalence). Always a bug, never a user error.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

class DeadlockDetected : public Error {
 public:
  using Error::Error;
};

}  // namespace premlog
