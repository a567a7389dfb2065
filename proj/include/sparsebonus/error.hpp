#pragma once

#include <stdexcept>
#include <string>

namespace sparsebonus {

/// Broken precondition or invariant at an API boundary.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Malformed configuration (bad P:B:N string, unknown env, bad JSON).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite loss during optimisation.
class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ContractViolation(message);
}

}  // namespace sparsebonus
