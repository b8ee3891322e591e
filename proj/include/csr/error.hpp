#pragma once

#include <stdexcept>
#include <string>

namespace csr {

// Bad arguments, shapes or configuration supplied by the caller.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Unreadable or malformed input data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite values or a diverged optimization.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace csr
