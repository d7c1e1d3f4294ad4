#pragma once

#include <stdexcept>
#include <string>

namespace sdris {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: bad shapes, invariant violations, out-of-range options.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Text or image input could not be parsed.
class ParseError : public Error {
 public:
  using Error::Error;
};

// The I-projection potentials left the admissible box, which signals
// constraint targets on (or outside) the boundary of the feasible set.
class UnboundedPotentials : public Error {
 public:
  using Error::Error;
};

// Every restart of a feature fit failed.
class FitError : public Error {
 public:
  using Error::Error;
};

}  // namespace sdris
