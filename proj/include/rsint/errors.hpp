#pragma once

#include <stdexcept>
#include <string>

namespace rsint {

/// Invalid input: bad sizes, out-of-range parameters, missing grid times.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A parameter combination outside the regime where a result holds.
/// `constraint()` carries the violated inequality verbatim so that drivers
/// can surface it to the user.
class RegimeError : public ArgumentError {
 public:
  RegimeError(const std::string& what, std::string constraint)
      : ArgumentError(what + " (requires " + constraint + ")"),
        constraint_(std::move(constraint)) {}

  const std::string& constraint() const noexcept { return constraint_; }

 private:
  std::string constraint_;
};

/// Factorisation or eigenvalue failures, non-finite Monte Carlo output.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rsint
