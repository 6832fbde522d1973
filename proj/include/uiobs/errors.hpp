#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace uiobs {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression text. `position()` is a 0-based character offset.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : Error(message + " at position " + std::to_string(position)), position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

class UnknownIdentifier : public Error {
 public:
  UnknownIdentifier(const std::string& name, std::size_t position)
      : Error("unknown identifier \"" + name + "\" at position " + std::to_string(position)),
        name_(name),
        position_(position) {}

  const std::string& name() const noexcept { return name_; }
  std::size_t position() const noexcept { return position_; }

 private:
  std::string name_;
  std::size_t position_;
};

/// Numeric evaluation left the domain of an operation.
class DomainError : public Error {
 public:
  enum class Kind { DivisionByZero, NegativeSqrt, NonPositiveLog, NonFinite };

  DomainError(Kind kind, const std::string& node)
      : Error(describe(kind) + " in " + node), kind_(kind), node_(node) {}

  Kind kind() const noexcept { return kind_; }
  /// Printed (possibly truncated) form of the offending subexpression.
  const std::string& node() const noexcept { return node_; }

  static std::string describe(Kind kind) {
    switch (kind) {
      case Kind::DivisionByZero: return "division by zero";
      case Kind::NegativeSqrt: return "sqrt of a negative number";
      case Kind::NonPositiveLog: return "ln of a non-positive number";
      case Kind::NonFinite: return "non-finite result";
    }
    return "domain error";
  }

 private:
  Kind kind_;
  std::string node_;
};

/// Variable index or vector length does not match the ambient space.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Every candidate sample point hit a domain error or a guard.
class SamplingError : public Error {
 public:
  using Error::Error;
};

/// Invalid system description or run configuration.
class SpecError : public Error {
 public:
  using Error::Error;
};

}  // namespace uiobs
