#pragma once

#include <stdexcept>
#include <string>

namespace fixlab {

/// Error raised when a model precondition fails. `reason()` is a stable
/// snake_case token suitable for machine-readable output.
class Error : public std::runtime_error {
 public:
  Error(std::string reason, const std::string& message)
      : std::runtime_error(message), reason_(std::move(reason)) {}

  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string reason_;
};

}  // namespace fixlab
