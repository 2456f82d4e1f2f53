#pragma once

#include <stdexcept>
#include <string>

namespace ifecr {

// Bad sizes, wrong element classification, non-SPD tensors, malformed options.
struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Geometry too degenerate to proceed (zero-volume simplex, non-planar polygon).
struct DegenerateGeometry : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Iterative algorithm breakdown (CG on an indefinite matrix, stagnating
// eigenvalue estimate, basis coefficient denominator collapse).
struct NumericalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Point evaluation outside the meshed domain.
struct OutOfDomain : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// File export/import problems.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

} // namespace ifecr
