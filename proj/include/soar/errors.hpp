#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace soar {

/// Violated call contract (dimension mismatch, bad precondition).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Invalid configuration (files, specs, step-size conditions).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SvdError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Iteration produced a non-finite value.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::size_t step, const std::string& what)
      : std::runtime_error(what), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// Conjugate-gradient breakdown (zero direction curvature).
class BreakdownError : public std::runtime_error {
 public:
  BreakdownError(std::size_t step, const std::string& what)
      : std::runtime_error(what), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

class UndefinedMetricError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace soar
