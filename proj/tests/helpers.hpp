#pragma once

#include <cmath>

#include <doctest.h>

#include "fdot/geometry.hpp"
#include "fdot/params.hpp"

namespace testutil {

inline double rel_diff(double a, double b) {
  const double scale = std::max(std::fabs(a), std::fabs(b));
  return scale == 0.0 ? 0.0 : std::fabs(a - b) / scale;
}

// Reference tissue model of the shipped experiments.
inline fdot::PhysicalParams params_ell(double ell) {
  return fdot::PhysicalParams().with_ell(ell);
}

// The default source/detector pair used by most pinned values below.
inline fdot::SdPair default_pair() {
  return fdot::SdPair(fdot::Vec3{6, 10, 0}, fdot::Vec3{14, 10, 0});
}

}  // namespace testutil

// Relative-tolerance check with a readable failure message.
#define CHECK_REL(actual, expected, tol)                      \
  do {                                                        \
    const double a_ = (actual), e_ = (expected), t_ = (tol);  \
    INFO("actual " << a_ << " expected " << e_ << " rel "     \
                   << testutil::rel_diff(a_, e_));            \
    CHECK(testutil::rel_diff(a_, e_) <= t_);                  \
  } while (0)
