#pragma once

#include <stdexcept>
#include <string>

namespace cleanbound {

// Bad inputs: out-of-range values, malformed configs, dimension mismatches.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// The accuracy bound cannot be computed because tau <= 0.
class VacuousBoundError : public std::runtime_error {
 public:
  explicit VacuousBoundError(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite values encountered during optimization.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace cleanbound
