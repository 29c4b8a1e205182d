#pragma once

#include <stdexcept>
#include <string>

namespace coevo {

// Invalid configuration or parameter set, detected before a run starts.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the domain of a mathematical operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Numerical breakdown during a run (e.g. a fate probability leaving [0, 1]).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace coevo
