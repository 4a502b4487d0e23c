#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace superint {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A primitive or arithmetic operation left its domain (pole, log of a
/// nonpositive value, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed expression or system file, located at a 1-based line/column.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column, std::size_t offset)
      : Error(what), line_(line), column_(column), offset_(offset) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::size_t offset_;
};

/// Structurally valid input that violates a semantic rule (unknown
/// identifier, n < 3, nonlinear parameter dependence, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Singular metric, rank-deficient solve, variance mismatch and similar
/// numerical or bookkeeping failures.
class NumericError : public Error {
 public:
  using Error::Error;
};

class ClassificationError : public Error {
 public:
  using Error::Error;
};

}  // namespace superint
