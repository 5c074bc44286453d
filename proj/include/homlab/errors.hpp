#pragma once

#include <stdexcept>
#include <string>

namespace homlab {

// Invalid input, configuration, or violated precondition. CLI exit code 2.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical failure: non-convergent iteration, infeasible inversion,
// divergent quadrature. CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace homlab
