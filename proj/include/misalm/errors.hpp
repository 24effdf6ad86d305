#pragma once

#include <stdexcept>
#include <string>

namespace misalm {

/// Invalid configuration: bad schedule parameters, incompatible rates, etc.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Operand shapes do not agree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iteration cap was hit before the requested accuracy was certified.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The inner APG budget T_k exceeds the configured iteration cap at some epoch.
class BudgetExceeded : public ConvergenceError {
 public:
  BudgetExceeded(long epoch, long budget, long cap)
      : ConvergenceError("inner budget " + std::to_string(budget) +
                         " exceeds cap " + std::to_string(cap) +
                         " at outer epoch " + std::to_string(epoch)),
        epoch_(epoch) {}
  long epoch() const { return epoch_; }

 private:
  long epoch_;
};

}  // namespace misalm
