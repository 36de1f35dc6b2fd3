#pragma once

#include <stdexcept>
#include <string>

namespace cgmodel {

/// Base of every error the library raises on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of an operation
/// (odd N for Goldbach, x < 16 for the truncation threshold, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent input: parse failures, duplicate family
/// members, inadmissible families, bad configuration keys.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A request would exceed the configured memory budget.
class ResourceError : public Error {
 public:
  using Error::Error;
};

}  // namespace cgmodel
