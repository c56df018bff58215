#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dimgrp {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed textual input. line/column are 1-based; line is 1 for
// single-line sources such as command-line arguments, and both are 0 when
// the problem is structural rather than at a position (a missing JSON key).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(what), line_(line), column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// An operation was called outside its documented domain.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// An identity that the construction guarantees did not hold. Always a bug.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

// Exhaustive enumeration would exceed its point budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace dimgrp
