#pragma once

#include <stdexcept>
#include <string>

namespace rpm {

/// Invalid scenario, experiment or CLI input. Maps to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Failure while executing a valid configuration. Maps to exit code 2.
class RuntimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Internal invariant broken (engine bug). Never caught inside the library.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace rpm
