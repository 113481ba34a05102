#pragma once

#include <stdexcept>
#include <string>

namespace topattr {

// Bad user input: unknown map names, out-of-range parameters, malformed files.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A point handed to an operation does not belong to the space it claims.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// An iteration or search ran out of its budget before converging.
class BudgetExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace topattr
