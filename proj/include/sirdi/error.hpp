#pragma once

#include <stdexcept>
#include <string>

namespace sirdi {

/// Argument outside the mathematical domain of a function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// R0 * s <= 1: the final-size equation has no strictly positive root.
class SubcriticalDomain : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Invalid parameters or configuration. Messages name the offending field.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Total event rate is zero; the chain cannot move.
class AbsorbedEmpty : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptySample : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class BinMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace sirdi
