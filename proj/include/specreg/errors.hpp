#pragma once

#include <stdexcept>
#include <string>

namespace specreg {

/// A caller violated a documented precondition (shape, range, ordering).
class ContractError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// An argument lies outside the mathematical domain of a function.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// A diagonal multiplier has a zero (or flushed) entry, so the operator is not injective.
class SingularMultiplierError : public std::runtime_error {
public:
  SingularMultiplierError(const std::string& what, std::size_t index)
      : std::runtime_error(what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

private:
  std::size_t index_;
};

/// The discrepancy threshold is not bracketed by the residuals at the interval ends.
class BracketError : public std::runtime_error {
public:
  BracketError(const std::string& what, double residual_lo, double residual_hi)
      : std::runtime_error(what), residual_lo_(residual_lo), residual_hi_(residual_hi) {}
  double residual_lo() const noexcept { return residual_lo_; }
  double residual_hi() const noexcept { return residual_hi_; }

private:
  double residual_lo_;
  double residual_hi_;
};

/// A residual trace that should be nondecreasing in alpha was not.
class MonotonicityError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid experiment configuration; `field()` names the offending key.
class ConfigError : public std::runtime_error {
public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

private:
  std::string field_;
};

}  // namespace specreg
