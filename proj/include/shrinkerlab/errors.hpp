#pragma once

#include <stdexcept>
#include <string>

namespace shrinkerlab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a geometric formula (r <= 0, tau <= 0, n < 2, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IntegrationError : public Error {
 public:
  enum class Kind { StepSizeUnderflow, NonTransversalCrossing };

  IntegrationError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

class NonTransversalStart : public Error {
 public:
  using Error::Error;
};

class NoBracket : public Error {
 public:
  using Error::Error;
};

class NewtonDiverged : public Error {
 public:
  using Error::Error;
};

/// Finite-difference and variational Jacobians disagree beyond the cross-check tolerance.
class JacobianMismatch : public Error {
 public:
  using Error::Error;
};

/// Malformed or unusable profile (too few samples, r <= 0, broken closure, ...).
class ProfileError : public Error {
 public:
  using Error::Error;
};

}  // namespace shrinkerlab
