#pragma once

#include <stdexcept>
#include <string>

namespace heliqsim {

/// Base class for all recoverable failures raised by the simulator.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on shapes, sizes or parameter ranges was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A query fell outside the sampled domain of a profile or table.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// The trap potential does not have the two-minima/one-barrier shape.
class NotDoubleWell : public Error {
 public:
  using Error::Error;
};

/// An iterative or direct solver failed to produce a usable answer.
class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace heliqsim
