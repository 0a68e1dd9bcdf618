#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace sdefit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent user configuration (schema, flags, CSV syntax).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

class StateEscapedDomain : public DomainError {
 public:
  StateEscapedDomain(std::size_t index, double value)
      : DomainError("state left the model domain at index " + std::to_string(index) +
                    " (x = " + std::to_string(value) + ")"),
        index_(index),
        value_(value) {}

  std::size_t index() const noexcept { return index_; }
  double value() const noexcept { return value_; }

 private:
  std::size_t index_;
  double value_;
};

class IndicesNotSubgrid : public DomainError {
 public:
  using DomainError::DomainError;
};

class NotErgodic : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Every optimizer start terminated on the boundary of the parameter box.
class NoInteriorMaximum : public Error {
 public:
  using Error::Error;
};

class NonFiniteCriterion : public Error {
 public:
  NonFiniteCriterion(const std::string& what, std::vector<double> theta)
      : Error(what), theta_(std::move(theta)) {}

  const std::vector<double>& theta() const noexcept { return theta_; }

 private:
  std::vector<double> theta_;
};

}  // namespace sdefit
