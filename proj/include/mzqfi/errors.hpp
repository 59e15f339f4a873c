#pragma once

#include <stdexcept>
#include <string>

namespace mzqfi {

// Invalid parameter or configuration value. Raised before any computation.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Operating point where a requested quantity is not defined (deterministic
// binary statistic, zero trace, visibility outside (0,1), ...).
class DegenerateError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Argument falls outside the domain of an inverse map.
class OutOfDomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Truncated Fock space is too small for the requested state.
class CutoffError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Quadratic term dominates a first-order (susceptibility) fit.
class NonlinearityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Search over an integer range did not find a crossover.
class SearchExhaustedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input file does not match the expected schema or version.
class SchemaError : public IoError {
 public:
  using IoError::IoError;
};

namespace detail {

inline void require(bool cond, const std::string& what) {
  if (!cond) throw InvalidArgument(what);
}

}  // namespace detail
}  // namespace mzqfi
