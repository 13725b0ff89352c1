#pragma once

#include <stdexcept>
#include <string>

namespace normlab {

/// Operand dimensions do not fit the requested operation.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An operator fails a structural precondition (Hermitian, normal, banded ...).
class HypothesisError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Iterative routine failed to converge or produced a non-finite value.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Missing or malformed input (absent matrix, unknown entry, bad file).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace normlab
