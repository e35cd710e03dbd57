#pragma once

#include <stdexcept>
#include <string>

namespace fitheight {

/// Base of every engine error.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller violated a documented precondition (non-normal kernel,
/// non-coprime product, index out of range, mixed ambient groups, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A configured work limit (coset count, generator count, group order)
/// would be exceeded.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

/// An internal consistency check failed. Seeing one of these means the
/// engine computed something mathematically impossible.
class EngineBug : public Error {
 public:
  using Error::Error;
};

}  // namespace fitheight
