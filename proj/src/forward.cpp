#include "fdot/forward.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "fdot/erfcx.hpp"
#include "fdot/errors.hpp"
#include "fdot/peak_approx.hpp"

namespace fdot {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double khat(double xc3, double t, const PhysicalParams& p) {
  if (p.beta == 0.0) return 1.0;
  const double vD = p.vD();
  const double xi = (xc3 + 2.0 * p.beta * vD * t) / std::sqrt(4.0 * vD * t);
  return 1.0 - p.beta * std::sqrt(kPi * vD * t) * erfcx(xi);
}

namespace {

// Raw convolution integrand of the zero-lifetime response (without the
// t-dependent prefactor). Guarded so that endpoint evaluations and
// underflowing exponents return exact zeros instead of inf*0.
struct UmIntegrand {
  double t, A, B, xc3, four_vD;
  const PhysicalParams& p;

  double operator()(double s) const {
    const double ts = t - s;
    if (s <= 0.0 || ts <= 0.0) return 0.0;
    const double expo = -A / (four_vD * ts) - B / (four_vD * s);
    if (expo < -700.0) return 0.0;
    return std::pow(ts * s, -1.5) * std::exp(expo) * khat(xc3, ts, p) *
           khat(xc3, s, p);
  }
};

}  // namespace

double um_zero_lifetime(double t, const SdPair& pair, const Target& target,
                        const PhysicalParams& p, double rel_tol) {
  if (!(t > 0.0))
    throw std::invalid_argument("um_zero_lifetime: t must be > 0");
  const double A = norm_sq(pair.xd - target.xc);
  const double B = norm_sq(pair.xs - target.xc);
  const UmIntegrand g{t, A, B, target.xc.z, 4.0 * p.vD(), p};

  // Substitutions s = t*sigma^2 (left half) and t - s = t*tau^2 (right half)
  // flatten the integrable (.)^{-3/2} endpoint structure; each half is then
  // smooth and rapidly decaying toward 0.
  const double half = std::sqrt(0.5);
  auto left = [&](double sig) { return g(t * sig * sig) * 2.0 * t * sig; };
  auto right = [&](double tau) { return g(t - t * tau * tau) * 2.0 * t * tau; };

  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  double e1 = 0.0, e2 = 0.0;
  const double q1 = GK::integrate(left, 0.0, half, 15, rel_tol, &e1);
  const double q2 = GK::integrate(right, 0.0, half, 15, rel_tol, &e2);
  const double integral = q1 + q2;
  const double err = e1 + e2;
  if (!(err <= 100.0 * rel_tol * std::max(std::fabs(integral), 1e-280))) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "um_zero_lifetime: quadrature error %.3e exceeds budget at "
                  "t=%.6g (value %.6e)",
                  err, t, integral);
    throw QuadratureError(buf);
  }

  const double k = p.k();
  const double pref =
      p.c_strength * std::exp(-k * t) / (16.0 * kPi * kPi * kPi * p.D * p.D * p.v);
  return pref * integral;
}

double um_asymptotic(double t, const SdPair& pair, const Target& target,
                     const PhysicalParams& p) {
  if (!(t > 0.0)) throw std::invalid_argument("um_asymptotic: t must be > 0");
  const double dd = norm(pair.xd - target.xc);
  const double ds = norm(pair.xs - target.xc);
  const double vD = p.vD();
  const double lam2 = (dd * dd + ds * ds) / (2.0 * vD);
  const double C0 = p.c_strength /
                    (8.0 * std::pow(kPi, 2.5) * std::sqrt(p.v) * std::pow(p.D, 1.5)) *
                    (1.0 / dd + 1.0 / ds);
  const double xc3 = target.xc.z;
  const double screen = xc3 / (xc3 + p.beta * vD * t);
  return C0 * std::exp(-p.k() * t) * std::pow(t, -1.5) * std::exp(-lam2 / t) *
         screen * screen;
}

namespace {

// {0}, geometric prefix (endpoint-exclusive) over [1e-4, 0.05]*t_max, then
// linear to t_max. n total points.
std::vector<double> build_grid(double t_max, int n) {
  if (!(t_max > 0.0)) throw std::invalid_argument("grid: t_max must be > 0");
  if (n < 64) throw std::invalid_argument("grid: need at least 64 points");
  const double t_lo = t_max * 1e-4, t_knee = t_max * 0.05;
  const int nlog = n / 16;
  const int nlin = n - nlog - 1;
  std::vector<double> ts;
  ts.reserve(n);
  ts.push_back(0.0);
  const double q = std::pow(t_knee / t_lo, 1.0 / nlog);
  double v = t_lo;
  for (int i = 0; i < nlog; ++i, v *= q) ts.push_back(v);
  for (int i = 0; i < nlin; ++i)
    ts.push_back(t_knee + (t_max - t_knee) * i / (nlin - 1));
  ts.back() = t_max;  // exact endpoint
  return ts;
}

// Exact integral of the exponential kernel against the linear interpolant on
// one cell: (1/ell) int_0^h exp(-(h-x)/ell) (ua + m x) dx
//         = ub - ua*exp(-h/ell) + m*ell*expm1(-h/ell).
double conv_cell(double ua, double ub, double h, double ell) {
  const double E = std::exp(-h / ell);
  const double m = (ub - ua) / h;
  return ub - ua * E + m * ell * std::expm1(-h / ell);
}

}  // namespace

GridSpec resolve_grid(const SdPair& pair, const Target& target,
                      const PhysicalParams& p, GridSpec grid) {
  if (grid.t_max > 0.0) return grid;
  const PeakEquationContext ctx(pair, target, p);
  double predicted;
  if (large_ell_validity(ctx).ok())
    predicted = asymptotic_peak_large_ell(ctx).t_peak;
  else
    predicted = asymptotic_peak_small_ell(ctx).t_peak;
  grid.t_max = 5.0 * predicted;
  return grid;
}

LifetimeEvaluator::LifetimeEvaluator(const SdPair& pair, const Target& target,
                                     const PhysicalParams& p,
                                     const GridSpec& grid)
    : pair_(pair), target_(target), params_(p) {
  const GridSpec g = resolve_grid(pair, target, p, grid);
  ts_ = build_grid(g.t_max, g.n);
  us_.resize(ts_.size());
  us_[0] = 0.0;
  for (std::size_t i = 1; i < ts_.size(); ++i)
    us_[i] = um_zero_lifetime(ts_[i], pair_, target_, params_);

  const double ell = params_.ell;
  if (ell <= 0.0) {
    Us_ = us_;
    return;
  }
  Us_.resize(ts_.size());
  Us_[0] = 0.0;
  for (std::size_t i = 0; i + 1 < ts_.size(); ++i) {
    const double h = ts_[i + 1] - ts_[i];
    Us_[i + 1] = std::exp(-h / ell) * Us_[i] +
                 conv_cell(us_[i], us_[i + 1], h, ell);
  }
}

double LifetimeEvaluator::um(double t) const {
  if (t <= 0.0) return 0.0;
  return um_zero_lifetime(t, pair_, target_, params_);
}

double LifetimeEvaluator::Um(double t) const {
  if (t <= 0.0) return 0.0;
  if (t > ts_.back())
    throw std::invalid_argument("LifetimeEvaluator::Um: t beyond grid");
  if (params_.ell <= 0.0) return um(t);
  const auto it = std::upper_bound(ts_.begin(), ts_.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - ts_.begin()) - 1;
  const double dt = t - ts_[i];
  if (dt == 0.0) return Us_[i];
  const double ut = um(t);
  return std::exp(-dt / params_.ell) * Us_[i] +
         conv_cell(us_[i], ut, dt, params_.ell);
}

double Um_lifetime(double t, const SdPair& pair, const Target& target,
                   const PhysicalParams& p, int n) {
  if (!(t > 0.0)) throw std::invalid_argument("Um_lifetime: t must be > 0");
  if (p.ell <= 0.0) return um_zero_lifetime(t, pair, target, p);
  const LifetimeEvaluator ev(pair, target, p, GridSpec{t, n});
  return ev.Um_values().back();
}

CurveFamily curve_family(const SdPair& pair, const Target& target,
                         const PhysicalParams& p, const GridSpec& grid) {
  const LifetimeEvaluator ev(pair, target, p, grid);
  CurveMeta meta{pair, target, p};
  return CurveFamily{
      ResponseCurve{ev.times(), ev.um_values(), meta},
      ResponseCurve{ev.times(), ev.Um_values(), meta},
  };
}

PeakTimeEstimate peak_time_numeric(const SdPair& pair, const Target& target,
                                   const PhysicalParams& p,
                                   const GridSpec& grid) {
  const LifetimeEvaluator ev(pair, target, p, grid);
  const auto& Us = ev.Um_values();
  const auto& ts = ev.times();
  const std::size_t j = static_cast<std::size_t>(
      std::max_element(Us.begin(), Us.end()) - Us.begin());
  if (j == 0 || j + 1 == Us.size())
    throw PeakNotBracketed(
        "peak_time_numeric: curve maximum on the grid boundary; increase "
        "t_max");

  // Golden-section maximization on the bracketing cells.
  const double invphi = 0.6180339887498949;
  double a = ts[j - 1], b = ts[j + 1];
  double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
  double f1 = ev.Um(x1), f2 = ev.Um(x2);
  const double tol = grid.refine_tol > 0.0 ? grid.refine_tol : 0.1;
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = ev.Um(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = ev.Um(x1);
    }
  }
  PeakTimeEstimate est;
  est.t_peak = 0.5 * (a + b);
  est.method = PeakMethod::numeric;
  return est;
}

}  // namespace fdot
