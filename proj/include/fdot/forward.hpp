#pragma once

#include <limits>
#include <vector>

#include "fdot/geometry.hpp"
#include "fdot/params.hpp"

namespace fdot {

// Half-space Robin boundary kernel
//   khat(xc3, t) = 1 - beta*sqrt(pi*vD*t) * erfcx((xc3 + 2*beta*vD*t)/sqrt(4*vD*t))
// Lies in (0, 1]; equals 1 exactly for beta = 0.
double khat(double xc3, double t, const PhysicalParams& p);

// Zero-lifetime temporal response: prefactor c*exp(-k*t)/(16 pi^3 D^2 v)
// times the time-convolution integral of the two half-space Green's factors
// and boundary kernels. Evaluated by adaptive Gauss-Kronrod on the two halves
// of [0, t] with endpoint-flattening substitutions s = t*sigma^2 and
// t - s = t*tau^2. Throws QuadratureError if the error estimate is not met.
double um_zero_lifetime(double t, const SdPair& pair, const Target& target,
                        const PhysicalParams& p, double rel_tol = 1e-8);

// Large-depth closed-form profile
//   C0 * exp(-k t) * t^{-3/2} * exp(-lambda^2/t) * (xc3/(xc3+beta*vD*t))^2,
//   C0 = c/(8 pi^{5/2} v^{1/2} D^{3/2}) * (1/|xd-xc| + 1/|xs-xc|).
double um_asymptotic(double t, const SdPair& pair, const Target& target,
                     const PhysicalParams& p);

// Evaluation grid for response curves: {0}, a geometric prefix resolving the
// fast turn-on, then linear spacing up to t_max. refine_tol is the absolute
// tolerance (ps) of the golden-section peak refinement.
struct GridSpec {
  double t_max = 0.0;  // 0 = choose automatically (5x predicted peak)
  int n = 2048;
  double refine_tol = 0.1;
};

struct CurveMeta {
  SdPair pair;
  Target target;
  PhysicalParams params;
};

// A sampled temporal response. times[0] == 0 and values[0] == 0 (zero initial
// condition); all values >= 0. Immutable once built.
struct ResponseCurve {
  std::vector<double> times;
  std::vector<double> values;
  CurveMeta meta;
};

// Cached u_m grid plus exponential-lifetime convolution
//   U_m(t) = int_0^t ell^{-1} exp(-(t-s)/ell) u_m(s) ds.
// u_m is sampled once on the grid; U_m is accumulated by integrating the
// piecewise-linear interpolant against the exponential kernel exactly per
// cell (stable even when ell is far below the grid step). For ell = 0 the
// response reduces to u_m itself.
class LifetimeEvaluator {
 public:
  LifetimeEvaluator(const SdPair& pair, const Target& target,
                    const PhysicalParams& p, const GridSpec& grid);

  const std::vector<double>& times() const { return ts_; }
  const std::vector<double>& um_values() const { return us_; }
  const std::vector<double>& Um_values() const { return Us_; }

  // Off-grid U_m(t): exponential decay of the last grid prefix plus the exact
  // partial-cell contribution with a fresh u_m(t) endpoint evaluation.
  double Um(double t) const;
  // Fresh adaptive u_m(t).
  double um(double t) const;

  const SdPair& pair() const { return pair_; }
  const Target& target() const { return target_; }
  const PhysicalParams& params() const { return params_; }

 private:
  SdPair pair_;
  Target target_;
  PhysicalParams params_;
  std::vector<double> ts_, us_, Us_;
};

// Single-point finite-lifetime response. Builds a grid over [0, t]; prefer
// LifetimeEvaluator or curve_family for repeated evaluation.
double Um_lifetime(double t, const SdPair& pair, const Target& target,
                   const PhysicalParams& p, int n = 2048);

// u_m and U_m sampled on a shared grid (one u_m pass serves both).
struct CurveFamily {
  ResponseCurve um;
  ResponseCurve Um;
};
CurveFamily curve_family(const SdPair& pair, const Target& target,
                         const PhysicalParams& p, const GridSpec& grid);

enum class PeakMethod {
  numeric,
  small_ell_root,
  large_ell_root,
  asymptotic_small,
  asymptotic_large,
};

struct PeakTimeEstimate {
  double t_peak = 0.0;
  PeakMethod method = PeakMethod::numeric;
  // Dimensionless defining-equation residual at the returned root: equation
  // value scaled by k for the rate-equation roots, log-LHS minus log-RHS for
  // the long-lifetime transcendental equation. NaN where no equation applies.
  double residual = std::numeric_limits<double>::quiet_NaN();
  // Set when the requested expansion is being used outside its comfort zone
  // (e.g. lifetime not small against the zero-lifetime peak time).
  bool regime_warning = false;
};

// Fills grid.t_max (when 0) with 5x the predicted peak time of the closed-form
// expansions, choosing the branch by the lifetime validity conditions.
GridSpec resolve_grid(const SdPair& pair, const Target& target,
                      const PhysicalParams& p, GridSpec grid);

// Ground-truth peak time: argmax of the finite-lifetime response over the
// grid, refined by derivative-free golden-section search on the bracketing
// cells to grid.refine_tol (ps). Throws PeakNotBracketed when the argmax
// lands on the grid boundary (t_max too small).
PeakTimeEstimate peak_time_numeric(const SdPair& pair, const Target& target,
                                   const PhysicalParams& p,
                                   const GridSpec& grid = {});

}  // namespace fdot
