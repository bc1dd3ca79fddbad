#include "fdot/inversion.hpp"

#include <cmath>
#include <cstdio>
#include <string>
#include <utility>

#include "fdot/errors.hpp"
#include "fdot/rng.hpp"

namespace fdot {

namespace {
constexpr double kSqrtPi = 1.7724538509055160273;
constexpr double kPi = 3.14159265358979323846;

// Rethrow stage failures with the pipeline stage prepended, preserving the
// concrete exception type so callers can still catch what went wrong.
template <class F>
auto with_stage(const char* stage, F&& f) -> decltype(f()) {
  auto tag = [&](const char* what) { return std::string(stage) + ": " + what; };
  try {
    return f();
  } catch (const DegenerateTetrahedron& e) {
    throw DegenerateTetrahedron(tag(e.what()), e.discriminant);
  } catch (const GeometryError& e) {
    throw GeometryError(tag(e.what()));
  } catch (const ValidityError& e) {
    throw ValidityError(tag(e.what()));
  } catch (const NonPositiveLambda& e) {
    throw NonPositiveLambda(tag(e.what()));
  } catch (const QuadratureError& e) {
    throw QuadratureError(tag(e.what()));
  } catch (const PeakNotBracketed& e) {
    throw PeakNotBracketed(tag(e.what()));
  } catch (const RootNotBracketed& e) {
    throw RootNotBracketed(tag(e.what()));
  } catch (const NoConvergence& e) {
    throw NoConvergence(tag(e.what()));
  }
}

void check_perpendicular(double theta1, double theta2, const char* where) {
  const double d = std::remainder(theta2 - theta1 - 0.5 * kPi, 2.0 * kPi);
  if (std::fabs(d) > 1e-9)
    throw std::invalid_argument(std::string(where) +
                                ": theta2 - theta1 must equal pi/2 (mod 2pi)");
}

double sphere_radius(double lambda, const SdPair& pair,
                     const PhysicalParams& p, SeparationTerm conv) {
  if (conv == SeparationTerm::subtract)
    return radius_from_lambda(lambda, pair, p);
  return std::sqrt(p.vD() * lambda * lambda + 0.25 * pair.separation_sq());
}

}  // namespace

double add_noise(double t_peak, const NoiseSpec& spec, std::mt19937_64& rng) {
  if (spec.delta_hat == 0.0) return t_peak;
  const double u = uniform01(rng);
  return (1.0 + spec.delta_hat * (2.0 * u - 1.0)) * t_peak;
}

double alpha_tilde(double t, const PhysicalParams& p) {
  const double k = p.k();
  if (!(p.ell > 0.0) || !(p.ell * k > 1.0))
    throw ValidityError("alpha_tilde: requires ell > 1/k");
  const double arg = kSqrtPi / p.ell / std::sqrt(k - 1.0 / p.ell) * std::sqrt(t);
  if (!(arg < 1.0)) {
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "alpha_tilde: long-lifetime case condition fails at "
                  "t=%.6g (log argument %.6g >= 1)",
                  t, arg);
    throw ValidityError(buf);
  }
  return std::sqrt(-std::log(arg));
}

double lambda_from_peak(double t, const PhysicalParams& p,
                        LambdaBranch branch) {
  if (!(t > 0.0))
    throw std::invalid_argument("lambda_from_peak: t must be > 0");
  const double k = p.k();
  double lam;
  if (branch == LambdaBranch::small_ell) {
    const double sk = std::sqrt(k);
    lam = sk * t + 1.75 / sk - (1.0 / sk) * sk / (sk + p.beta * std::sqrt(p.vD())) -
          p.ell * sk;
  } else {
    const double at = alpha_tilde(t, p);  // throws ValidityError off-branch
    const double a = std::sqrt(k - 1.0 / p.ell);
    lam = a * t - at * std::sqrt(t) + at * at / (2.0 * a);
  }
  if (!(lam > 0.0)) {
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "lambda_from_peak: non-positive lambda %.6g at t=%.6g "
                  "(peak time below the expansion regime)",
                  lam, t);
    throw NonPositiveLambda(buf);
  }
  return lam;
}

std::array<SdPair, 3> place_sd_pairs(const SdPair& initial, double r,
                                     double theta1, double theta2) {
  if (!(r > 0.0))
    throw std::invalid_argument("place_sd_pairs: r must be > 0");
  const Vec3 s1{r * std::cos(theta1), r * std::sin(theta1), 0.0};
  const Vec3 s2{r * std::cos(theta2), r * std::sin(theta2), 0.0};
  return {initial, SdPair(initial.xs + s1, initial.xd + s1),
          SdPair(initial.xs + s2, initial.xd + s2)};
}

ReconstructionResult reconstruct_target(double r, double r1, double r2,
                                        double theta1, double theta2,
                                        const Vec3& initial_midpoint) {
  if (!(r > 0.0 && r1 > 0.0 && r2 > 0.0))
    throw std::invalid_argument("reconstruct_target: radii must be > 0");
  check_perpendicular(theta1, theta2, "reconstruct_target");

  const double x = (2.0 * r * r - r1 * r1) / (2.0 * r);
  const double y = (2.0 * r * r - r2 * r2) / (2.0 * r);
  const double disc = r1 * r1 + r2 * r2 -
                      (r1 * r1 * r1 * r1 + r2 * r2 * r2 * r2) / (4.0 * r * r) -
                      r * r;
  if (disc < 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "reconstruct_target: no real apex, discriminant %.6e < 0 "
                  "(radii r=%.6g r1=%.6g r2=%.6g); re-measure",
                  disc, r, r1, r2);
    throw DegenerateTetrahedron(buf, disc);
  }
  const double c3 = std::sqrt(disc);

  ReconstructionResult res;
  res.radii = {r, r1, r2};
  res.x = x;
  res.y = y;
  res.discriminant = disc;
  res.target_estimate =
      initial_midpoint + x * Vec3{std::cos(theta1), std::sin(theta1), 0.0} +
      y * Vec3{std::cos(theta2), std::sin(theta2), 0.0} + Vec3{0.0, 0.0, c3};
  return res;
}

double rel_err(const Target& truth, const Vec3& estimate) {
  return norm(truth.xc - estimate) / norm(truth.xc);
}

namespace {

LambdaBranch pick_branch(double t, const PhysicalParams& p,
                         BranchPolicy policy) {
  if (policy == BranchPolicy::force_small) return LambdaBranch::small_ell;
  if (policy == BranchPolicy::force_large) return LambdaBranch::large_ell;
  const double k = p.k();
  if (!(p.ell > 0.0) || !(p.ell * k > 1.0)) return LambdaBranch::small_ell;
  const double arg = kSqrtPi / p.ell / std::sqrt(k - 1.0 / p.ell) * std::sqrt(t);
  return arg < 1.0 ? LambdaBranch::large_ell : LambdaBranch::small_ell;
}

// Shared pipeline tail: times -> lambdas -> radii -> apex. The measure
// callback produces the peak time for a placed pair (numeric simulation or
// external measurement), already noise-free; noise is applied here so the
// draw order is fixed (one draw per measurement, pipeline order).
template <class Measure>
ReconstructionResult run_pipeline(const SdPair& initial,
                                  const PhysicalParams& p,
                                  const InvertOptions& opts, Measure measure) {
  check_perpendicular(opts.theta1, opts.theta2, "invert");
  std::mt19937_64 rng(opts.noise.seed);

  const double t1 = with_stage("initial measurement",
                               [&] { return measure(0, initial); });
  const double t1n = add_noise(t1, opts.noise, rng);
  const LambdaBranch branch = pick_branch(t1n, p, opts.branch_policy);

  const double lam1 =
      with_stage("distance parameter, initial pair",
                 [&] { return lambda_from_peak(t1n, p, branch); });
  const double r = with_stage("sphere radius, initial pair", [&] {
    return sphere_radius(lam1, initial, p, opts.separation_term);
  });

  const auto pairs = place_sd_pairs(initial, r, opts.theta1, opts.theta2);

  const double t2 = with_stage("measurement, theta1 pair",
                               [&] { return measure(1, pairs[1]); });
  const double t2n = add_noise(t2, opts.noise, rng);
  const double lam2 =
      with_stage("distance parameter, theta1 pair",
                 [&] { return lambda_from_peak(t2n, p, branch); });
  const double r1 = with_stage("sphere radius, theta1 pair", [&] {
    return sphere_radius(lam2, pairs[1], p, opts.separation_term);
  });

  const double t3 = with_stage("measurement, theta2 pair",
                               [&] { return measure(2, pairs[2]); });
  const double t3n = add_noise(t3, opts.noise, rng);
  const double lam3 =
      with_stage("distance parameter, theta2 pair",
                 [&] { return lambda_from_peak(t3n, p, branch); });
  const double r2 = with_stage("sphere radius, theta2 pair", [&] {
    return sphere_radius(lam3, pairs[2], p, opts.separation_term);
  });

  ReconstructionResult res = with_stage("apex reconstruction", [&] {
    return reconstruct_target(r, r1, r2, opts.theta1, opts.theta2,
                              initial.midpoint());
  });
  res.branch = branch;
  res.peak_times = {t1n, t2n, t3n};
  res.lambdas = {lam1, lam2, lam3};
  res.pairs = pairs;
  return res;
}

}  // namespace

ReconstructionResult invert(const SdPair& initial, const Target& truth,
                            const PhysicalParams& p,
                            const InvertOptions& opts) {
  ReconstructionResult res =
      run_pipeline(initial, p, opts, [&](int, const SdPair& pr) {
        return peak_time_numeric(pr, truth, p, opts.grid).t_peak;
      });
  res.rel_err = rel_err(truth, res.target_estimate);
  return res;
}

ReconstructionResult invert(const SdPair& initial,
                            const std::array<double, 3>& peak_times,
                            const PhysicalParams& p,
                            const InvertOptions& opts) {
  for (double t : peak_times)
    if (!(t > 0.0))
      throw std::invalid_argument("invert: peak times must be > 0");
  return run_pipeline(initial, p, opts,
                      [&](int i, const SdPair&) { return peak_times[i]; });
}

}  // namespace fdot
