#pragma once

#include <stdexcept>
#include <string>

namespace dgsl {

// Base class for every error raised by the library. The subclasses map onto
// the CLI exit codes (1 usage/config, 2 data, 3 numerical).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad arguments: shape mismatches, out-of-range counts, invalid parameters.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent input data (files, labels, constraint sets).
class DataError : public Error {
 public:
  using Error::Error;
};

// Factorization failures, vanishing denominators, non-finite iterates.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace dgsl
