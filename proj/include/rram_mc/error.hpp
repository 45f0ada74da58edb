#pragma once

#include <stdexcept>

namespace rram_mc {

// Raised when a caller hands an operation a value outside its domain.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised for unparsable, unknown, or invariant-violating configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised for file-system failures while writing or reading run artifacts.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rram_mc
