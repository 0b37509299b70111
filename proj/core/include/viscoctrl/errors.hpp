#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace viscoctrl {

// Precondition violations are reported as std::invalid_argument. The types
// below cover the failure classes the command-line runner maps to distinct
// exit codes.

/// A discretization is too coarse for the requested data.
class NumericalGuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Time step too large for a modal frequency (h * lambda > 0.5).
class ResolutionGuardError : public NumericalGuardError {
 public:
  ResolutionGuardError(std::size_t mode_index, double lambda, double step);

  std::size_t mode_index() const noexcept { return mode_index_; }
  double lambda() const noexcept { return lambda_; }

 private:
  std::size_t mode_index_;
  double lambda_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace viscoctrl
