#pragma once

#include <stdexcept>
#include <string>

namespace kurasync {

/// Base of every error thrown by the library. The CLI maps all of these to
/// exit status 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed caller input: out-of-range vertices, self-loops, bad files.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A randomized generator exhausted its restart budget.
class GenerationError : public Error {
 public:
  using Error::Error;
};

/// An iterative routine did not reach its certified accuracy.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double best_residual)
      : Error(what), best_residual_(best_residual) {}
  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

/// A closed-form evaluator was called outside the parameter domain on which
/// its result is meaningful.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An amplification schedule is malformed or violates a step's gate.
class ScheduleError : public Error {
 public:
  using Error::Error;
};

/// A threshold search was given a bracket that does not straddle the
/// pass/fail boundary.
class BracketError : public Error {
 public:
  using Error::Error;
};

/// A self-check on a mathematical conclusion failed. Signals a bug or a
/// misclassified input rather than bad user input.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace kurasync
