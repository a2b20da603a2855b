#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace eqstab {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a documented precondition (defect too large, spectrum at a
/// branch cut, eigenvalue in a forbidden band, ...).
class PreconditionError : public Error {
 public:
  PreconditionError(std::string what, double measured)
      : Error(std::move(what)), measured_(measured) {}
  explicit PreconditionError(std::string what) : PreconditionError(std::move(what), 0.0) {}

  /// The offending measured quantity.
  double measured() const noexcept { return measured_; }

 private:
  double measured_;
};

/// Shapes or block structures that do not fit together.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Bad construction parameters (group order over cap, malformed tables, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace eqstab
