#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sosforge {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shape mismatch between operands (rows/cols/block counts).
struct DimensionError : Error {
  using Error::Error;
};

// A value-level precondition failed (bad name, bad map, bad range).
struct ArgumentError : Error {
  using Error::Error;
};

// Out-of-range entry access.
struct IndexError : Error {
  using Error::Error;
};

// An operation would make the result nonlinear in the decision variables.
struct NonlinearityError : Error {
  using Error::Error;
};

// Unknown or duplicate decision variable in a program.
struct RegistrationError : Error {
  using Error::Error;
};

// Inconsistent structure options (sym/pos) for a quadratic variable grid.
struct OptionError : Error {
  using Error::Error;
};

// Problem exceeds the embedded solver's intended size envelope.
struct CapacityError : Error {
  using Error::Error;
};

// Text could not be parsed; `offset` is the byte position of the failure.
struct ParseError : Error {
  std::size_t offset;
  ParseError(const std::string& what, std::size_t off) : Error(what), offset(off) {}
};

// Filesystem / stream failure.
struct IoError : Error {
  using Error::Error;
};

}  // namespace sosforge
