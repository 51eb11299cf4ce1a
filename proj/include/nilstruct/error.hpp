#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace nilstruct {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised by the expression parser and the manifest reader; carries the
// character offset (expression text) or line number (manifest).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " (at position " + std::to_string(position) + ")"),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// Evaluation of an expression hit a domain problem (log of a non-positive
// value, division by zero, ...). Carries the offending sub-expression.
class EvalError : public Error {
 public:
  EvalError(const std::string& what, std::string subexpression)
      : Error(what + " in sub-expression '" + subexpression + "'"),
        subexpression_(std::move(subexpression)) {}
  const std::string& subexpression() const { return subexpression_; }

 private:
  std::string subexpression_;
};

// A matrix that must be invertible is numerically singular. Carries the
// sample point at which the failure was detected, when one is available.
class SingularError : public Error {
 public:
  explicit SingularError(const std::string& what) : Error(what) {}
  SingularError(const std::string& what, std::vector<double> point)
      : Error(what + " at point " + format_point(point)),
        point_(std::move(point)) {}
  const std::vector<double>& point() const { return point_; }

 private:
  static std::string format_point(const std::vector<double>& p);
  std::vector<double> point_;
};

// Rank/dimension/slot-kind mismatches between tensor operands.
class ShapeError : public Error {
 public:
  using Error::Error;
};

}  // namespace nilstruct
