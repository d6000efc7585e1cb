#pragma once

#include <stdexcept>
#include <string>

namespace hgoe {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input: missing files, malformed formats, shape or count mismatches.
// Mapped to exit code 2 by the CLI.
class DataError : public Error {
 public:
  using Error::Error;
};

// Numerical failure: non-finite values, singular systems.
// Mapped to exit code 3 by the CLI.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace hgoe
