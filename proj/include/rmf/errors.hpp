#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rmf {

/// Argument outside an operation's documented domain (bad limit, non-prime, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An epsilon model that breaks symmetry, normalisation or the fourth-moment bound.
class ModelInvalid : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A quantity that is undefined for the given inputs (L <= 0, zero variance, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A memory or work budget would be exceeded.
class ResourceError : public std::runtime_error {
 public:
  ResourceError(const std::string& what, std::uint64_t required)
      : std::runtime_error(what), required_(required) {}

  /// Bytes (or work units, as stated in the message) the request needs.
  std::uint64_t required() const noexcept { return required_; }

 private:
  std::uint64_t required_;
};

}  // namespace rmf
