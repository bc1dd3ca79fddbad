#pragma once

#include "fdot/forward.hpp"
#include "fdot/geometry.hpp"
#include "fdot/params.hpp"

namespace fdot {

// Inputs of the peak-time equations: absorption rate k, distance parameter
// lambda, target depth xc3, plus the full parameter set (for beta, vD, ell).
struct PeakEquationContext {
  double k;
  double lambda;
  double xc3;
  PhysicalParams params;

  PeakEquationContext(double lambda_, double xc3_, const PhysicalParams& p);
  PeakEquationContext(const SdPair& pair, const Target& target,
                      const PhysicalParams& p);
};

// Logarithmic slope of the large-depth profile:
//   P(t) = -k - (3/2)/t + lambda^2/t^2 - 2*beta*vD/(xc3 + beta*vD*t).
double P_value(double t, const PeakEquationContext& ctx);
double P_derivative(double t, const PeakEquationContext& ctx);

// Unique positive root of P(t) = 0 (peak of the zero-lifetime profile).
// Brackets around the beta = 0 closed form
//   t = (sqrt(4 k lambda^2 + 9/4) - 3/2) / (2k)
// then runs safeguarded Newton; |P(root)| < 1e-12 * k.
double solve_P_root(const PeakEquationContext& ctx);

// Short-lifetime peak: the upper positive root of
//   P(t) = ell * (P'(t) + P(t)^2),
// safeguarded Newton initialized at solve_P_root(ctx) + ell. Exactly the
// P-root when ell = 0. regime_warning is set when ell > 0.25 * t0.
PeakTimeEstimate approx_peak_small_ell(const PeakEquationContext& ctx);

// Closed-form short-lifetime expansion:
//   k^{-1/2} lambda - (7/4) k^{-1} + k^{-1} sqrt(k)/(sqrt(k)+beta*sqrt(vD)) + ell.
PeakTimeEstimate asymptotic_peak_small_ell(const PeakEquationContext& ctx);

// Validity of the long-lifetime branch. Both conditions must hold:
//   (a) ell > 1/k;
//   (b) ell > sqrt(pi) * (k - 1/ell)^{-3/4} * lambda^{1/2},
// recorded as threshold_arg = sqrt(pi)/ell * (k-1/ell)^{-3/4} * lambda^{1/2} < 1.
struct LargeEllValidity {
  bool lifetime_exceeds_absorption_time = false;  // (a)
  bool lifetime_exceeds_lambda_threshold = false;  // (b)
  double threshold_arg = 0.0;                      // infinite when (a) fails
  bool ok() const {
    return lifetime_exceeds_absorption_time && lifetime_exceeds_lambda_threshold;
  }
};
LargeEllValidity large_ell_validity(const PeakEquationContext& ctx);

// Long-lifetime peak: with a = sqrt(k - 1/ell), the root t > lambda/a of
//   exp(-(a t - lambda)^2 / t)
//     = sqrt(pi)/(ell*lambda) * t^{3/2} * ((xc3+beta*vD*t)/(xc3+beta*vD*lambda/a))^2,
// solved in log space by safeguarded Newton initialized at the closed-form
// expansion below. Throws ValidityError when large_ell_validity fails.
PeakTimeEstimate approx_peak_large_ell(const PeakEquationContext& ctx);

// Closed-form long-lifetime expansion:
//   a^{-1} lambda + a^{-3/2} alpha_lambda lambda^{1/2},
//   alpha_lambda = sqrt(-log(sqrt(pi)/ell * a^{-3/2} * lambda^{1/2})).
// Throws ValidityError when the log argument is >= 1.
PeakTimeEstimate asymptotic_peak_large_ell(const PeakEquationContext& ctx);

}  // namespace fdot
