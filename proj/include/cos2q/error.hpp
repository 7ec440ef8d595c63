#pragma once

#include <stdexcept>
#include <string>

namespace cos2q {

/// Violated precondition or malformed input (bad cutoff, bad config, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical routine failed to meet its contract (non-convergence,
/// gap closure, norm drift, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cos2q
