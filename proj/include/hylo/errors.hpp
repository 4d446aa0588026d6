#pragma once

#include <stdexcept>
#include <string>

namespace hylo {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Precondition violated by the caller (bad order, mismatched grids, dt <= 0, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// |C(u)| too small for the quotient E/|C| to be meaningful.
class NearZeroCharge : public Error {
 public:
  using Error::Error;
};

// Non-finite values, non-convergence, failed charge restoration.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

// Malformed field files, traces or configuration documents.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace hylo
