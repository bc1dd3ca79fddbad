#pragma once

namespace fdot {

// Scaled complementary error function erfcx(x) = exp(x^2) * erfc(x).
//
// The boundary kernel needs erfcx at arguments up to ~1e3 where exp(x^2)
// overflows long before erfc underflows, so the product must never be formed
// at large x. For x >= 4 a Laplace continued fraction is used; below that the
// explicit product is exact-safe (exp(x^2) <= e^16) and std::erfc is accurate.
// Accurate to ~1e-14 relative for x >= 0.
double erfcx(double x);

}  // namespace fdot
