#pragma once

#include <stdexcept>
#include <string>

namespace bdpo {

// Error taxonomy mirrored by the CLI exit codes:
// validation -> 1, I/O -> 2, numerical failure -> 3.

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bdpo
