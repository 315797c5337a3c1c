#pragma once

#include <stdexcept>
#include <string>

namespace pgrdrc {

// Raised for anything a caller can provoke with bad inputs: unreadable or
// malformed files, out-of-domain values, datasets that violate an
// operation's preconditions. Internal invariant breaks throw
// std::logic_error instead.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pgrdrc
