#pragma once

#include <stdexcept>
#include <string>

namespace chiral {

/// Bad input: malformed config, out-of-range parameter, wrong matrix shape.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical breakdown: solver non-convergence, non-finite state.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No exceptional point inside the searched rate bracket.
class NoRootError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace chiral
