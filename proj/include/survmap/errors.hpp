#pragma once

#include <stdexcept>
#include <string>

namespace survmap {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument is outside the documented domain of an operation.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Parameters are individually valid but cannot describe a per-cycle chain
/// (e.g. an implied mean up time below one cycle).
class InfeasibleParameters : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

/// A requirement set that no network parameters can satisfy.
class InfeasibleRequirement : public Error {
 public:
  using Error::Error;
};

class NumericalFailure : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace survmap
