#pragma once

#include <stdexcept>
#include <string>

namespace reloc {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Quadrature, bracketing or other numerical procedure failed to converge.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Request exceeds a built horizon or a fixed enumeration capacity.
class CapacityError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Valid inputs that an operation does not handle (e.g. anisotropic tails).
class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Configuration rejected by validation. `assumption()` names the violated
/// admissibility condition (e.g. "A2").
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string assumption, const std::string& message)
      : std::invalid_argument(assumption.empty() ? message : assumption + ": " + message),
        assumption_(std::move(assumption)) {}

  const std::string& assumption() const noexcept { return assumption_; }

 private:
  std::string assumption_;
};

}  // namespace reloc
