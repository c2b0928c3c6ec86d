#pragma once

#include <stdexcept>
#include <string>

namespace radsel {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid model parameters or malformed model documents.
class ModelError : public Error {
 public:
  using Error::Error;
};

/// Caller-side contract violation (rank out of range, bad grid, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// A digit position beyond the configured depth cap was requested.
/// During selection this means two data agree on every digit up to the cap.
class DepthCapError : public Error {
 public:
  using Error::Error;
};

/// A requested table or tree would exceed the memory budget, or a tolerance
/// cannot be reached within the evaluation budget.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// Closed-form expression with a vanishing denominator.
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

/// Covariance matrix could not be factorized even after jitter escalation.
class NotPsdError : public Error {
 public:
  using Error::Error;
};

}  // namespace radsel
