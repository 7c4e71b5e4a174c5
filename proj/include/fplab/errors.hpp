#pragma once

#include <stdexcept>
#include <string>

namespace fplab {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// An orthonormality or certificate invariant failed.
class CertificateViolation : public Error {
  using Error::Error;
};

/// An iterative scheme exhausted its budget before reaching its target.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual_)
      : Error(what + " (residual " + std::to_string(residual_) + ")"),
        residual(residual_) {}
  double residual = 0.0;
};

/// A precondition on the argument domain failed.
class DomainError : public Error {
  using Error::Error;
};

/// A construction cannot proceed (dimension exhausted, empty net, mismatch).
class ConstructionError : public Error {
  using Error::Error;
};

/// Ball-intersection feasibility failed: anchor data is not 1-Lipschitz.
class InfeasibleExtension : public Error {
 public:
  InfeasibleExtension(const std::string& what, double slack_)
      : Error(what + " (slack " + std::to_string(slack_) + ")"), slack(slack_) {}
  double slack = 0.0;
};

/// Config or schema problem; `pointer` is a JSON pointer into the config.
class ConfigError : public Error {
 public:
  ConfigError(std::string pointer_, const std::string& what)
      : Error(pointer_ + ": " + what), pointer(std::move(pointer_)) {}
  std::string pointer;
};

}  // namespace fplab
