#ifndef GVARKIT_ERRORS_HPP_
#define GVARKIT_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace gvarkit {

// Error taxonomy maps onto CLI exit codes:
//   ConfigError -> 2, DataError -> 3, NumericError -> 4.

// Invalid options, malformed configuration, mismatched modes.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or inconsistent input data (parse failures, coverage gaps,
// series too short for the requested procedure).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical or analysis failures (rank deficiency, singular systems,
// degenerate inputs, non-convergent draws).
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace gvarkit

#endif  // GVARKIT_ERRORS_HPP_
