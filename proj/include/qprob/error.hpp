#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace qprob {

// Caller supplied something outside an operation's domain (bad dimension,
// index, non-normalized weights, ...). Maps to CLI exit code 2.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DimensionMismatch : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class IndexOutOfRange : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class NotHermitian : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// Arithmetic went wrong in a well-posed call. Maps to CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoConvergence : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DenominatorVanishes : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DegenerateProspect : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// A condensate path whose population imbalance reached the |s| = 1 boundary.
class StepRejected : public NumericalError {
 public:
  StepRejected(std::uint64_t path, std::uint64_t step, double s)
      : NumericalError("step rejected on path " + std::to_string(path) +
                       " at step " + std::to_string(step) +
                       ": |s| = " + std::to_string(s) + " reached the boundary"),
        path_(path),
        step_(step) {}

  std::uint64_t path() const noexcept { return path_; }
  std::uint64_t step() const noexcept { return step_; }

 private:
  std::uint64_t path_;
  std::uint64_t step_;
};

}  // namespace qprob
