#pragma once

#include <stdexcept>
#include <string>

namespace ndtv {

// Shape or axis mismatch between arrays/operators.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Argument outside its mathematical domain (p < 1, eps < 0, ...).
struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Malformed or unsupported file / container contents.
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid experiment or CLI configuration.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A requested exhaustive computation exceeds its configured budget.
struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ndtv
