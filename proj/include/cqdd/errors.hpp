#pragma once

#include <stdexcept>
#include <string>

namespace cqdd {

// Bad caller input: out-of-range qubit, size mismatch, unknown label...
class InvalidArgument : public std::invalid_argument {
 public:
  explicit InvalidArgument(const std::string& what) : std::invalid_argument(what) {}
};

// A numerically degenerate situation the library refuses to arbitrate:
// zero-probability postselection, zero normalization constant,
// near-degenerate ground space.
class DegenerateError : public std::runtime_error {
 public:
  explicit DegenerateError(const std::string& what) : std::runtime_error(what) {}
};

// An internal invariant (e.g. unit norm) was found broken.
class InvariantViolation : public std::logic_error {
 public:
  explicit InvariantViolation(const std::string& what) : std::logic_error(what) {}
};

// Reading or writing an artifact file failed.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cqdd
