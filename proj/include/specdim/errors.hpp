#pragma once

#include <stdexcept>
#include <string>

namespace specdim {

// Numerical failure: non-finite intermediate, convergence loss, vanishing
// integrand. Kept distinct from std::invalid_argument so callers (and the
// CLI exit-code mapping) can tell bad input from a numeric breakdown.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace specdim
