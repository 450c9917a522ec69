#pragma once

#include <stdexcept>
#include <string>

namespace papml {

// Bad input: malformed config, dataset, or arguments. The CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Failure while running: numerical blow-up, unwritable output. CLI exit code 2.
class RuntimeError : public std::runtime_error {
 public:
  explicit RuntimeError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace papml
