#pragma once

#include <stdexcept>
#include <string>

namespace labeldist {

// Invalid inputs: bad files, violated preconditions, malformed config.
// The CLI maps this to exit code 1. Everything else that escapes
// (std::logic_error etc.) is an internal invariant failure, exit code 2.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace labeldist
