#pragma once

#include <stdexcept>
#include <string>

namespace shocklab {

// Bad argument values (rates, grids, ranges).
struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Start/end sets that admit no path, contours that violate nesting, unsupported ICs.
struct GeometryError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Size guards (enumeration span, simulation window cap).
struct GuardError : std::length_error {
  using std::length_error::length_error;
};

// Quadrature or determinant results that cannot be trusted.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace shocklab
