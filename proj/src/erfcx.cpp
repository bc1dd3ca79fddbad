#include "fdot/erfcx.hpp"

#include <cmath>

namespace fdot {

namespace {
constexpr double kInvSqrtPi = 0.5641895835477562869;  // 1/sqrt(pi)
}

double erfcx(double x) {
  if (x < 4.0) {
    // exp(x^2) <= e^16 here, no overflow; erfc(x) >= erfc(4) ~ 1.5e-8, well
    // inside the normal range.
    return std::exp(x * x) * std::erfc(x);
  }
  // Laplace continued fraction
  //   erfcx(x) = (1/sqrt(pi)) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
  // evaluated by backward recurrence. Depth 100 is far past convergence for
  // x >= 4 (roughly 30 terms suffice there, fewer as x grows).
  double cf = 0.0;
  for (int n = 100; n >= 1; --n) cf = 0.5 * n / (x + cf);
  return kInvSqrtPi / (x + cf);
}

}  // namespace fdot
