#include "fdot/peak_approx.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "fdot/errors.hpp"

namespace fdot {

namespace {
constexpr double kSqrtPi = 1.7724538509055160273;
}

PeakEquationContext::PeakEquationContext(double lambda_, double xc3_,
                                         const PhysicalParams& p)
    : k(p.k()), lambda(lambda_), xc3(xc3_), params(p) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("PeakEquationContext: lambda must be > 0");
  if (!(xc3 > 0.0))
    throw std::invalid_argument("PeakEquationContext: xc3 must be > 0");
}

PeakEquationContext::PeakEquationContext(const SdPair& pair,
                                         const Target& target,
                                         const PhysicalParams& p)
    : PeakEquationContext(lambda_param(pair, target, p), target.xc.z, p) {}

double P_value(double t, const PeakEquationContext& ctx) {
  const double bvD = ctx.params.beta * ctx.params.vD();
  return -ctx.k - 1.5 / t + ctx.lambda * ctx.lambda / (t * t) -
         2.0 * bvD / (ctx.xc3 + bvD * t);
}

double P_derivative(double t, const PeakEquationContext& ctx) {
  const double bvD = ctx.params.beta * ctx.params.vD();
  const double den = ctx.xc3 + bvD * t;
  return 1.5 / (t * t) - 2.0 * ctx.lambda * ctx.lambda / (t * t * t) +
         2.0 * bvD * bvD / (den * den);
}

namespace {

double P_second(double t, const PeakEquationContext& ctx) {
  const double bvD = ctx.params.beta * ctx.params.vD();
  const double den = ctx.xc3 + bvD * t;
  return -3.0 / (t * t * t) + 6.0 * ctx.lambda * ctx.lambda / (t * t * t * t) -
         4.0 * bvD * bvD * bvD / (den * den * den);
}

// Safeguarded Newton on f over a sign-changing bracket [lo, hi] with
// f(lo) > 0 > f(hi). Bisects whenever the Newton step leaves the bracket.
// Converges when |f| <= f_tol or the bracket/step tightens below 1e-12
// relative; throws NoConvergence after max_iter.
double newton_bracketed(const std::function<double(double)>& f,
                        const std::function<double(double)>& df, double lo,
                        double hi, double x0, double f_tol,
                        const char* what) {
  const int max_iter = 100;
  double x = x0;
  if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
  for (int it = 0; it < max_iter; ++it) {
    const double fx = f(x);
    if (std::fabs(fx) <= f_tol) return x;
    if (fx > 0.0)
      lo = x;
    else
      hi = x;
    const double d = df(x);
    double xn = (d != 0.0) ? x - fx / d : lo;  // force bisection on flat spot
    if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
    if (std::fabs(xn - x) <= 1e-12 * std::fabs(x)) {
      x = xn;
      const double r = f(x);
      if (std::fabs(r) <= f_tol) return x;
      // Step collapsed without meeting the residual target: fold the fresh
      // sign into the bracket and tighten by pure bisection for the
      // remaining budget. Break only when the bracket has no interior point
      // left (adjacent doubles).
      if (r > 0.0)
        lo = x;
      else
        hi = x;
      xn = 0.5 * (lo + hi);
      if (xn == x || xn == lo || xn == hi) break;
    }
    x = xn;
  }
  if (std::fabs(f(x)) <= f_tol) return x;
  throw NoConvergence(std::string(what) + ": no convergence in 100 iterations");
}

}  // namespace

double solve_P_root(const PeakEquationContext& ctx) {
  const double k = ctx.k, lam = ctx.lambda;
  // beta = 0 closed form; with beta > 0 the root sits slightly below it.
  const double t_tilde =
      (std::sqrt(4.0 * k * lam * lam + 2.25) - 1.5) / (2.0 * k);

  double lo = t_tilde, hi = t_tilde;
  int guard = 0;
  while (P_value(lo, ctx) <= 0.0) {
    lo *= 0.5;
    if (++guard > 200)
      throw RootNotBracketed("solve_P_root: no positive lobe found below the "
                             "beta=0 root");
  }
  guard = 0;
  while (P_value(hi, ctx) >= 0.0) {
    hi *= 1.5;
    if (++guard > 200)
      throw RootNotBracketed("solve_P_root: P stays positive above the "
                             "beta=0 root");
  }

  auto f = [&](double t) { return P_value(t, ctx); };
  auto df = [&](double t) { return P_derivative(t, ctx); };
  return newton_bracketed(f, df, lo, hi, t_tilde, 1e-13 * k, "solve_P_root");
}

PeakTimeEstimate approx_peak_small_ell(const PeakEquationContext& ctx) {
  const double t0 = solve_P_root(ctx);
  const double ell = ctx.params.ell;
  PeakTimeEstimate est;
  est.method = PeakMethod::small_ell_root;
  est.regime_warning = ell > 0.25 * t0;
  if (ell == 0.0) {
    est.t_peak = t0;
    est.residual = std::fabs(P_value(t0, ctx)) / ctx.k;
    return est;
  }

  auto G = [&](double t) {
    const double P = P_value(t, ctx);
    return P - ell * (P_derivative(t, ctx) + P * P);
  };
  auto dG = [&](double t) {
    const double P = P_value(t, ctx);
    const double dP = P_derivative(t, ctx);
    return dP - ell * (P_second(t, ctx) + 2.0 * P * dP);
  };

  // G(t0) = -ell*P'(t0) > 0 and G -> -k - ell*k^2 < 0 at infinity; the
  // correction root is the sign change beyond t0 (a second, spurious root
  // lies below t0 and is excluded by this bracket).
  double lo = t0;
  if (!(G(lo) > 0.0))
    throw RootNotBracketed(
        "approx_peak_small_ell: correction equation not positive at the "
        "zero-lifetime root");
  double hi = t0 + ell;
  int guard = 0;
  while (G(hi) > 0.0) {
    lo = hi;
    hi = t0 + 1.6 * (hi - t0);
    if (++guard > 200)
      throw RootNotBracketed(
          "approx_peak_small_ell: no sign change beyond the zero-lifetime "
          "root");
  }

  const double root = newton_bracketed(G, dG, lo, hi, t0 + ell, 1e-13 * ctx.k,
                                       "approx_peak_small_ell");
  est.t_peak = root;
  est.residual = std::fabs(G(root)) / ctx.k;
  return est;
}

PeakTimeEstimate asymptotic_peak_small_ell(const PeakEquationContext& ctx) {
  const double k = ctx.k;
  const double sk = std::sqrt(k);
  const double bsq = ctx.params.beta * std::sqrt(ctx.params.vD());
  PeakTimeEstimate est;
  est.t_peak = ctx.lambda / sk - 1.75 / k + (1.0 / k) * sk / (sk + bsq) +
               ctx.params.ell;
  est.method = PeakMethod::asymptotic_small;
  return est;
}

LargeEllValidity large_ell_validity(const PeakEquationContext& ctx) {
  LargeEllValidity v;
  const double ell = ctx.params.ell;
  if (!(ell > 0.0) || !(ell * ctx.k > 1.0)) {
    // k - 1/ell <= 0: the long-lifetime powers are undefined (ell == 1/k is
    // excluded as well).
    v.threshold_arg = std::numeric_limits<double>::infinity();
    return v;
  }
  v.lifetime_exceeds_absorption_time = true;
  const double a2 = ctx.k - 1.0 / ell;
  v.threshold_arg =
      kSqrtPi / ell * std::pow(a2, -0.75) * std::sqrt(ctx.lambda);
  v.lifetime_exceeds_lambda_threshold = v.threshold_arg < 1.0;
  return v;
}

PeakTimeEstimate asymptotic_peak_large_ell(const PeakEquationContext& ctx) {
  const LargeEllValidity v = large_ell_validity(ctx);
  if (!v.lifetime_exceeds_absorption_time)
    throw ValidityError(
        "asymptotic_peak_large_ell: lifetime does not exceed 1/k");
  if (!(v.threshold_arg < 1.0))
    throw ValidityError(
        "asymptotic_peak_large_ell: log argument >= 1 (lifetime below the "
        "lambda threshold)");
  const double a = std::sqrt(ctx.k - 1.0 / ctx.params.ell);
  const double alpha = std::sqrt(-std::log(v.threshold_arg));
  PeakTimeEstimate est;
  est.t_peak = ctx.lambda / a + alpha * std::sqrt(ctx.lambda) / std::pow(a, 1.5);
  est.method = PeakMethod::asymptotic_large;
  return est;
}

PeakTimeEstimate approx_peak_large_ell(const PeakEquationContext& ctx) {
  const LargeEllValidity v = large_ell_validity(ctx);
  if (!v.ok())
    throw ValidityError(
        "approx_peak_large_ell: long-lifetime validity conditions fail "
        "(need ell > 1/k and ell above the lambda threshold)");

  const double ell = ctx.params.ell, lam = ctx.lambda, xc3 = ctx.xc3;
  const double a = std::sqrt(ctx.k - 1.0 / ell);
  const double bvD = ctx.params.beta * ctx.params.vD();
  const double t_min = lam / a;
  const double den0 = xc3 + bvD * t_min;

  // Log form of the defining equation: F(t) = 0 with
  //   F(t) = -(a t - lam)^2/t - log(sqrt(pi)/(ell*lam)) - 1.5*log(t)
  //          - 2*log((xc3 + bvD*t)/(xc3 + bvD*lam/a)).
  // F decreases strictly on (t_min, inf): F' = -a^2 + lam^2/t^2 - 1.5/t
  //                                            - 2*bvD/(xc3 + bvD*t).
  auto F = [&](double t) {
    const double num = a * t - lam;
    return -num * num / t - std::log(kSqrtPi / (ell * lam)) -
           1.5 * std::log(t) - 2.0 * std::log((xc3 + bvD * t) / den0);
  };
  auto dF = [&](double t) {
    return -a * a + lam * lam / (t * t) - 1.5 / t -
           2.0 * bvD / (xc3 + bvD * t);
  };

  const double t_init = asymptotic_peak_large_ell(ctx).t_peak;
  double lo = t_min * (1.0 + 1e-9);
  if (!(F(lo) > 0.0))
    throw RootNotBracketed(
        "approx_peak_large_ell: equation not positive at the domain edge");
  double hi = std::max(t_init, t_min * 1.25);
  int guard = 0;
  while (F(hi) > 0.0) {
    lo = hi;
    hi *= 1.4;
    if (++guard > 200)
      throw RootNotBracketed("approx_peak_large_ell: no sign change above "
                             "the domain edge");
  }

  const double root =
      newton_bracketed(F, dF, lo, hi, t_init, 1e-13, "approx_peak_large_ell");
  PeakTimeEstimate est;
  est.t_peak = root;
  est.method = PeakMethod::large_ell_root;
  est.residual = std::fabs(F(root));  // log-space, already relative
  return est;
}

}  // namespace fdot
