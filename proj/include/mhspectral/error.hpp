#pragma once

#include <stdexcept>
#include <string>

namespace mhs {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands whose block structure does not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// An argument outside the domain of the operation (negative entry, zero block, p < 1, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure produced non-finite values or failed its own postcondition.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace mhs
