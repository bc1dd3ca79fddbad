#pragma once

#include <stdexcept>

namespace fdot {

// Medium and fluorophore constants. Units are fixed: mm and ps throughout.
// Defaults are the reference half-space tissue model used by the shipped
// experiment configs.
struct PhysicalParams {
  double v;           // light speed in the medium, mm/ps
  double D;           // diffusion constant, mm
  double mu_a;        // absorption coefficient, 1/mm
  double beta;        // Robin boundary coefficient b/D, 1/mm
  double ell;         // fluorescence lifetime, ps (0 = instantaneous decay)
  double c_strength;  // target absorption strength (linear scale factor)

  explicit PhysicalParams(double v_ = 0.219, double D_ = 1.0 / 3.0,
                          double mu_a_ = 0.1, double beta_ = 0.5493,
                          double ell_ = 100.0, double c_ = 1.0)
      : v(v_), D(D_), mu_a(mu_a_), beta(beta_), ell(ell_), c_strength(c_) {
    if (!(v > 0.0)) throw std::invalid_argument("PhysicalParams: v must be > 0");
    if (!(D > 0.0)) throw std::invalid_argument("PhysicalParams: D must be > 0");
    if (!(mu_a > 0.0))
      throw std::invalid_argument("PhysicalParams: mu_a must be > 0");
    if (!(beta >= 0.0))
      throw std::invalid_argument("PhysicalParams: beta must be >= 0");
    if (!(ell >= 0.0))
      throw std::invalid_argument("PhysicalParams: ell must be >= 0");
    if (!(c_strength > 0.0))
      throw std::invalid_argument("PhysicalParams: c_strength must be > 0");
  }

  // absorption rate k = v*mu_a, 1/ps
  double k() const { return v * mu_a; }
  // diffusivity v*D, mm^2/ps
  double vD() const { return v * D; }

  PhysicalParams with_ell(double new_ell) const {
    return PhysicalParams(v, D, mu_a, beta, new_ell, c_strength);
  }
  PhysicalParams with_mu_a(double new_mu_a) const {
    return PhysicalParams(v, D, new_mu_a, beta, ell, c_strength);
  }
  PhysicalParams with_beta(double new_beta) const {
    return PhysicalParams(v, D, mu_a, new_beta, ell, c_strength);
  }
  PhysicalParams with_c(double new_c) const {
    return PhysicalParams(v, D, mu_a, beta, ell, new_c);
  }
};

inline double k_rate(const PhysicalParams& p) { return p.k(); }

}  // namespace fdot
