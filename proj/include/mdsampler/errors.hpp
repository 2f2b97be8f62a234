#pragma once

#include <stdexcept>
#include <string>

namespace md {

// Bad flag / config combinations. CLI exit code 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed or inconsistent input data. CLI exit code 3.
struct DataError : std::runtime_error {
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failures (descent non-convergence, non-SPD covariance, bad
// quadrature). CLI exit code 4. Deliberately distinct from the k = 0
// "outside recorded domains" classification, which is a valid outcome.
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

struct DescentError : NumericalError {
  explicit DescentError(const std::string& what) : NumericalError(what) {}
};

}  // namespace md
