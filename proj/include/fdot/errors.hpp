#pragma once

#include <stdexcept>
#include <string>

namespace fdot {

// Base class for all failures raised by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Sphere radius undefined: vD*lambda^2 fell below the half-separation term,
// i.e. the measured peak time is inconsistent with any target position.
struct GeometryError : Error {
  using Error::Error;
};

// Adaptive quadrature failed to reach the requested tolerance.
struct QuadratureError : Error {
  using Error::Error;
};

// Curve maximum sits on the grid boundary; T_max was chosen too small.
struct PeakNotBracketed : Error {
  using Error::Error;
};

// A root-bracketing search failed; indicates pathological inputs or a bug.
struct RootNotBracketed : Error {
  using Error::Error;
};

// Safeguarded Newton exhausted its iteration budget.
struct NoConvergence : Error {
  using Error::Error;
};

// Input lies outside the validity region of the requested expansion/branch.
struct ValidityError : Error {
  using Error::Error;
};

// Peak-time-to-distance map produced lambda <= 0 (time below expansion regime).
struct NonPositiveLambda : Error {
  using Error::Error;
};

// The three sphere radii admit no real apex above the plane.
struct DegenerateTetrahedron : Error {
  double discriminant;
  DegenerateTetrahedron(const std::string& msg, double disc)
      : Error(msg), discriminant(disc) {}
};

}  // namespace fdot
