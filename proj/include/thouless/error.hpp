#pragma once

#include <stdexcept>
#include <string>

namespace thouless {

// Base for all numerical/validation failures raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Adiabatic assumption violated: two bands come closer than the gap tolerance.
class BandTouchingError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class IntegratorError : public Error {
 public:
  using Error::Error;
};

// Perturbative denominator smaller than the allowed gap floor.
class DivergentDenominatorError : public Error {
 public:
  using Error::Error;
};

// Wave packet reached the site-index seam of the ring, where the literal
// position operator is discontinuous.
class SeamError : public Error {
 public:
  using Error::Error;
};

}  // namespace thouless
