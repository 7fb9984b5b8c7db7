#pragma once

#include <stdexcept>
#include <string>

namespace sekf {

/// Invalid configuration value (bad layer sizes, malformed policy spec, ...).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Dimension mismatch between operands.
struct ShapeError : std::invalid_argument {
  explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

/// Non-finite value or unrecoverable linear-algebra failure.
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or inconsistent external data (CSV streams, result bundles).
struct DataError : std::runtime_error {
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sekf
