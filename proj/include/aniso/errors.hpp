#pragma once

#include <stdexcept>
#include <string>

namespace aniso {

/// Violated precondition or invalid input. Maps to CLI exit code 2.
class PreconditionError : public std::invalid_argument {
 public:
  explicit PreconditionError(const std::string& what) : std::invalid_argument(what) {}
};

/// An iterative routine failed to reach its tolerance. Maps to CLI exit code 3.
class NonConvergenceError : public std::runtime_error {
 public:
  explicit NonConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace aniso
