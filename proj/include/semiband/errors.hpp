#pragma once

#include <stdexcept>
#include <string>

namespace semiband {

// Raised when a numerical routine cannot produce a result: a covariance
// that fails to factor, an eigensolver that does not converge.
class NumericalFailure : public std::runtime_error {
 public:
  explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace semiband
