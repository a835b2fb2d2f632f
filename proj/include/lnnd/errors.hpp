#pragma once

#include <stdexcept>
#include <string>

namespace lnnd {

/// Argument outside the domain of a formula or operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A series, continued fraction or root search failed to meet its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value that is positive in exact arithmetic is not representable as a double.
class UnderflowError : public std::range_error {
 public:
  using std::range_error::range_error;
};

}  // namespace lnnd
