#pragma once

// Similarity parameters and boundary conditions of the Falkner-Skan
// problem  f''' + f f'' + beta (1 - f'^2) = 0  on [0, eta_inf].

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

namespace skanfem {

/// Which boundary-condition triple (f(0), u(0), u(eta_inf)) is imposed.
/// Wedge is the classical wall/free-stream pair; Stretching swaps the two
/// velocity values and is only consistent when beta == 0.
enum class BcVariant { Wedge, Stretching };

inline std::string_view to_string(BcVariant v) {
  return v == BcVariant::Wedge ? "wedge" : "stretching";
}

inline BcVariant parse_bc_variant(std::string_view s) {
  if (s == "wedge") return BcVariant::Wedge;
  if (s == "stretching") return BcVariant::Stretching;
  throw std::invalid_argument("unknown boundary-condition variant '" + std::string(s) +
                              "' (expected wedge|stretching)");
}

/// beta = 2m / (m + 1). Undefined at m = -1.
inline double beta_from_m(double m) {
  if (!std::isfinite(m)) throw std::domain_error("wedge exponent m must be finite");
  if (m == -1.0) throw std::domain_error("wedge exponent m = -1 has no pressure-gradient parameter");
  return 2.0 * m / (m + 1.0);
}

/// Inverse map m = beta / (2 - beta), defined for beta < 2.
inline double m_from_beta(double beta) {
  if (!std::isfinite(beta)) throw std::domain_error("beta must be finite");
  if (beta >= 2.0) throw std::domain_error("beta must be < 2 to correspond to a finite wedge exponent");
  return beta / (2.0 - beta);
}

struct BcValues {
  double f_at_0 = 0.0;
  double u_at_0 = 0.0;
  double u_at_inf = 1.0;
};

/// Immutable, validated parameter set for one Falkner-Skan solve.
class FlowParams {
 public:
  static FlowParams from_m(double m, double eta_inf = 8.0, BcVariant bc = BcVariant::Wedge) {
    return FlowParams(m, beta_from_m(m), eta_inf, bc);
  }

  static FlowParams from_beta(double beta, double eta_inf = 8.0, BcVariant bc = BcVariant::Wedge) {
    return FlowParams(m_from_beta(beta), beta, eta_inf, bc);
  }

  double m() const noexcept { return m_; }
  double beta() const noexcept { return beta_; }
  double eta_inf() const noexcept { return eta_inf_; }
  BcVariant bc_variant() const noexcept { return bc_; }

  FlowParams with_eta_inf(double eta_inf) const { return FlowParams(m_, beta_, eta_inf, bc_); }

 private:
  FlowParams(double m, double beta, double eta_inf, BcVariant bc)
      : m_(m), beta_(beta), eta_inf_(eta_inf), bc_(bc) {
    if (!(eta_inf > 0.0) || !std::isfinite(eta_inf))
      throw std::invalid_argument("eta_inf must be positive and finite");
    if (bc == BcVariant::Stretching && beta != 0.0)
      throw std::invalid_argument("stretching boundary conditions require beta == 0");
  }

  double m_;
  double beta_;
  double eta_inf_;
  BcVariant bc_;
};

inline BcValues bc_values(const FlowParams& p) {
  switch (p.bc_variant()) {
    case BcVariant::Wedge:
      return {0.0, 0.0, 1.0};
    case BcVariant::Stretching:
      // u -> 0 at infinity leaves a residual beta in the strong form.
      if (p.beta() != 0.0) throw std::invalid_argument("stretching boundary conditions require beta == 0");
      return {0.0, 1.0, 0.0};
  }
  throw std::logic_error("unreachable boundary-condition variant");
}

}  // namespace skanfem
