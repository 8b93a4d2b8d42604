#pragma once

#include <stdexcept>
#include <string>

namespace rlab {

/// Raised when a request exceeds a configured enumeration or dense-storage
/// limit. The message always names the cap.
class CapacityError : public std::length_error {
 public:
  CapacityError(const std::string& what_arg, long long cap)
      : std::length_error(what_arg + " (cap = " + std::to_string(cap) + ")"),
        cap_(cap) {}

  long long cap() const noexcept { return cap_; }

 private:
  long long cap_;
};

/// Iterative solver failed to meet its residual target within the
/// iteration cap.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rlab
