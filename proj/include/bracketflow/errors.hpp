#pragma once

#include <stdexcept>
#include <string>

namespace bracketflow {

// Base of everything the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: wrong tensor sizes, bad JSON, unknown corpus names.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// An operation was called outside its domain.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// A theorem-backed property failed numerically. Always an implementation or
// input bug, never a warning.
class InvariantBreach : public Error {
 public:
  using Error::Error;
};

// The descent could not make progress at the smallest admissible step.
class StalledFlow : public Error {
 public:
  using Error::Error;
};

}  // namespace bracketflow
