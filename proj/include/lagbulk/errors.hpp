#pragma once

#include <stdexcept>
#include <string>

namespace lagbulk {

/// Invalid user-supplied parameter (bad sizes, nonpositive beta, center outside the bulk...).
class ParameterError : public std::invalid_argument {
 public:
  explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

/// Input outside the mathematical domain of an operation (nonpositive eigenvalue
/// for a log-density, nonpositive off-diagonal for Sturm counting).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// A numerical safety guard fired: a lifted step too large to be trusted, or an
/// SDE integration that did not settle.
class NumericalGuardError : public std::runtime_error {
 public:
  explicit NumericalGuardError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lagbulk
