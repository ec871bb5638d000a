#pragma once

#include <stdexcept>
#include <string>

namespace ctstat {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A numeric procedure failed (overflow, non-convergence, disagreement
/// between cross-checks).
class NumericError : public Error {
 public:
  using Error::Error;
};

/// The requested accuracy could not be reached.  Carries the best value
/// that was obtained together with its estimated absolute error.
class AccuracyError : public NumericError {
 public:
  AccuracyError(const std::string& what, double best_value, double estimated_error)
      : NumericError(what), best_value_(best_value), estimated_error_(estimated_error) {}

  double best_value() const noexcept { return best_value_; }
  double estimated_error() const noexcept { return estimated_error_; }

 private:
  double best_value_;
  double estimated_error_;
};

/// The operation is not available in closed form for the given law.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

}  // namespace ctstat
