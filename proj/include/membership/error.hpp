#pragma once

#include <stdexcept>
#include <string>

namespace membership {

// Base class for every operational failure raised by the library. Mathematical
// outcomes (an infeasible linear system, a non-member target) are reported as
// values, never through this hierarchy.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

/// No stored orientation constant for the requested dimension and strategy.
class CalibrationError : public Error {
 public:
  using Error::Error;
};

}  // namespace membership
