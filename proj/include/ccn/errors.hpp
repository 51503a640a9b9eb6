#pragma once

#include <stdexcept>
#include <string>

namespace ccn {

/// Precondition violated by the caller: bad index, wrong dimension, a cell
/// set that is not closed, a verifier premise that does not hold.
class DomainError : public std::invalid_argument {
 public:
  explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

/// Exhaustive subset enumeration requested above the configured limit.
class CapacityError : public std::length_error {
 public:
  explicit CapacityError(const std::string& what) : std::length_error(what) {}
};

/// A computation produced a non-finite value.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Unreadable or malformed input file.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ccn
