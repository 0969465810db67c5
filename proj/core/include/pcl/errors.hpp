#pragma once

#include <stdexcept>
#include <string>

namespace pcl {

// Bad input: violated precondition, malformed spec, hypothesis not met.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical guard tripped: non-finite sample, quadrature did not converge,
// size guard exceeded during evaluation.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

}  // namespace pcl
