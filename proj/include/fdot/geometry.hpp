#pragma once

#include <cmath>
#include <stdexcept>

#include "fdot/errors.hpp"
#include "fdot/params.hpp"

namespace fdot {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;
};

inline Vec3 operator+(const Vec3& a, const Vec3& b) {
  return {a.x + b.x, a.y + b.y, a.z + b.z};
}
inline Vec3 operator-(const Vec3& a, const Vec3& b) {
  return {a.x - b.x, a.y - b.y, a.z - b.z};
}
inline Vec3 operator*(double s, const Vec3& a) {
  return {s * a.x, s * a.y, s * a.z};
}
inline bool operator==(const Vec3& a, const Vec3& b) {
  return a.x == b.x && a.y == b.y && a.z == b.z;
}
inline double dot(const Vec3& a, const Vec3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}
inline double norm_sq(const Vec3& a) { return dot(a, a); }
inline double norm(const Vec3& a) { return std::sqrt(norm_sq(a)); }

// One source/detector pair. Both points lie exactly on the boundary plane
// z = 0 and must be distinct.
struct SdPair {
  Vec3 xs;  // source
  Vec3 xd;  // detector

  SdPair(const Vec3& source, const Vec3& detector) : xs(source), xd(detector) {
    if (xs.z != 0.0 || xd.z != 0.0)
      throw std::invalid_argument("SdPair: source/detector must lie on z=0");
    if (xs == xd)
      throw std::invalid_argument("SdPair: source and detector coincide");
  }

  Vec3 midpoint() const { return 0.5 * (xs + xd); }
  double separation_sq() const { return norm_sq(xd - xs); }
};

// Point target strictly inside the half space z > 0.
struct Target {
  Vec3 xc;

  explicit Target(const Vec3& pos) : xc(pos) {
    if (!(xc.z > 0.0))
      throw std::invalid_argument("Target: depth must be > 0");
  }
};

// Scalar quantities derived from one pair/target configuration.
struct SdGeometry {
  double k;                   // absorption rate, 1/ps
  double lambda;              // distance parameter
  Vec3 midpoint;              // pair midpoint, mm
  double half_separation_sq;  // |xd-xs|^2/4, mm^2
  // ||xd-xc|^2 - |xs-xc|^2| / (|xd-xc|^2 + |xs-xc|^2); diagnostic only, the
  // asymptotics assume the pair is not too lopsided about the target.
  double asymmetry_ratio;
};

// lambda = sqrt((|xd-xc|^2 + |xs-xc|^2) / (2 v D))
inline double lambda_param(const SdPair& pair, const Target& target,
                           const PhysicalParams& p) {
  const double a = norm_sq(pair.xd - target.xc);
  const double b = norm_sq(pair.xs - target.xc);
  return std::sqrt((a + b) / (2.0 * p.vD()));
}

// Sphere radius about the pair midpoint: sqrt(vD*lambda^2 - |xd-xs|^2/4).
// By the parallelogram identity this equals |xc - midpoint| when lambda comes
// from lambda_param of the true target.
inline double radius_from_lambda(double lambda, const SdPair& pair,
                                 const PhysicalParams& p) {
  const double val = p.vD() * lambda * lambda - 0.25 * pair.separation_sq();
  if (val < 0.0)
    throw GeometryError(
        "radius_from_lambda: vD*lambda^2 < |xd-xs|^2/4 (sphere would not "
        "reach the pair separation; inconsistent or overly noisy peak time)");
  return std::sqrt(val);
}

inline SdGeometry make_sd_geometry(const SdPair& pair, const Target& target,
                                   const PhysicalParams& p) {
  const double a = norm_sq(pair.xd - target.xc);
  const double b = norm_sq(pair.xs - target.xc);
  SdGeometry g;
  g.k = p.k();
  g.lambda = std::sqrt((a + b) / (2.0 * p.vD()));
  g.midpoint = pair.midpoint();
  g.half_separation_sq = 0.25 * pair.separation_sq();
  g.asymmetry_ratio = std::fabs(a - b) / (a + b);
  return g;
}

}  // namespace fdot
