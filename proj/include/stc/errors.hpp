#pragma once

#include <stdexcept>
#include <string>

namespace stc {

// Root of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Vector or matrix sizes do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A value is outside the accepted range (negative rate, empty input, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// The request is well formed but mathematically unsupported, e.g. a
// randomized-subset policy on an inadmissible load.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Problem size exceeds an enumeration or state budget.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

// A table or object was queried in a state it does not hold.
class StateError : public Error {
 public:
  using Error::Error;
};

}  // namespace stc
