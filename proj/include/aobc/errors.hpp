#pragma once

#include <stdexcept>
#include <string>

namespace aobc {

/// A parameter outside its documented domain (negative intensity, p > 1, ...).
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Path loss evaluated at zero distance.
class SingularityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Interference integral diverges (path loss exponent <= 2).
class DivergenceError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Subset enumeration requested beyond the configured node cap.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

}  // namespace aobc
