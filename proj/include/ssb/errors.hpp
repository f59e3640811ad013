#pragma once

#include <stdexcept>
#include <string>

namespace ssb {

// Bad user input or an unusable configuration (CLI exit code 1).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of a function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Any numerical breakdown (CLI exit code 2).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Integration aborted at a given radius.
class IntegrationError : public NumericalError {
 public:
  enum class Kind { step_underflow, divergence, step_limit, non_finite };
  IntegrationError(Kind kind, double r, const std::string& what)
      : NumericalError(what), kind_(kind), r_(r) {}
  Kind kind() const { return kind_; }
  double radius() const { return r_; }

 private:
  Kind kind_;
  double r_;
};

// Picard iteration on the interior failed to contract.
class ContractionError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace ssb
