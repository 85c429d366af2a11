#pragma once

#include <stdexcept>
#include <string>

namespace kaclab {

/// Precondition violated by the caller (bad index, bad dimension, bad parameter).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A numerical procedure could not deliver a result within tolerance.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw DomainError(message);
}

}  // namespace kaclab
