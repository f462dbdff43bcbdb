#pragma once

// Reference solution by shooting: integrate
//   f' = u,  u' = w,  w' = -(f w + beta (1 - u^2))
// from the wall with w(0) = alpha and root-find alpha so that u(eta_inf)
// hits the far-field value. Shares no code with the finite element path.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "skanfem/model.hpp"

namespace skanfem::oracle {

struct IvpState {
  double f = 0.0;
  double u = 0.0;
  double w = 0.0;
};

struct ProfileSample {
  double eta;
  double f;
  double u;
  double w;
};

struct IvpResult {
  IvpState terminal;
  double eta_end = 0.0;
  std::optional<double> blowup_at;  // eta where |state| first exceeded the blow-up bound
  /// First eta where u passed the far-field value.
  std::optional<double> overshoot_at;
  /// First eta where u turned back before reaching the far-field value.
  std::optional<double> turn_at;
  bool blew_up() const noexcept { return blowup_at.has_value(); }
};

inline constexpr double kBlowupBound = 1e8;

namespace detail {

inline IvpState rhs(const IvpState& s, double beta) {
  return {s.u, s.w, -(s.f * s.w + beta * (1.0 - s.u * s.u))};
}

inline IvpState axpy(const IvpState& s, double a, const IvpState& k) {
  return {s.f + a * k.f, s.u + a * k.u, s.w + a * k.w};
}

inline std::size_t step_count(double length, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("integration step must be positive");
  const double ratio = length / step;
  const double n = std::round(ratio);
  if (n < 1.0 || std::abs(ratio - n) > 1e-9 * std::max(1.0, ratio))
    throw std::invalid_argument("domain length must be an integer multiple of the integration step");
  return static_cast<std::size_t>(n);
}

}  // namespace detail

/// Classical fourth-order Runge-Kutta with a fixed step. When `samples` is
/// non-null every step is recorded, including eta = 0.
inline IvpResult integrate_ivp(const FlowParams& params, double alpha, double step,
                               std::vector<ProfileSample>* samples = nullptr) {
  const std::size_t n = detail::step_count(params.eta_inf(), step);
  const double h = params.eta_inf() / static_cast<double>(n);
  const double beta = params.beta();
  const BcValues bc = bc_values(params);

  IvpState s{bc.f_at_0, bc.u_at_0, alpha};
  IvpResult out;
  // +1 when u has to increase towards the far field, -1 when it decreases.
  const double dir = bc.u_at_inf >= bc.u_at_0 ? 1.0 : -1.0;
  if (samples) {
    samples->clear();
    samples->reserve(n + 1);
    samples->push_back({0.0, s.f, s.u, s.w});
  }
  for (std::size_t i = 0; i < n; ++i) {
    const IvpState k1 = detail::rhs(s, beta);
    const IvpState k2 = detail::rhs(detail::axpy(s, 0.5 * h, k1), beta);
    const IvpState k3 = detail::rhs(detail::axpy(s, 0.5 * h, k2), beta);
    const IvpState k4 = detail::rhs(detail::axpy(s, h, k3), beta);
    s.f += h / 6.0 * (k1.f + 2.0 * k2.f + 2.0 * k3.f + k4.f);
    s.u += h / 6.0 * (k1.u + 2.0 * k2.u + 2.0 * k3.u + k4.u);
    s.w += h / 6.0 * (k1.w + 2.0 * k2.w + 2.0 * k3.w + k4.w);
    const double eta = (i + 1 == n) ? params.eta_inf() : h * static_cast<double>(i + 1);
    out.eta_end = eta;
    if (samples) samples->push_back({eta, s.f, s.u, s.w});
    const double gap = dir * (s.u - bc.u_at_inf);
    if (!out.overshoot_at && !out.turn_at) {
      if (gap > 0.0) {
        out.overshoot_at = eta;
      } else if (dir * s.w < 0.0) {
        out.turn_at = eta;
      }
    }
    const bool finite = std::isfinite(s.f) && std::isfinite(s.u) && std::isfinite(s.w);
    if (!finite || std::abs(s.f) > kBlowupBound || std::abs(s.u) > kBlowupBound || std::abs(s.w) > kBlowupBound) {
      out.blowup_at = eta;
      break;
    }
  }
  out.terminal = s;
  return out;
}

/// Dense oracle profile; evaluates f and u between samples by cubic Hermite
/// interpolation using f' = u and u' = w.
class Profile {
 public:
  Profile() = default;
  explicit Profile(std::vector<ProfileSample> samples) : samples_(std::move(samples)) {
    if (samples_.size() < 2) throw std::invalid_argument("oracle profile needs at least two samples");
  }

  const std::vector<ProfileSample>& samples() const noexcept { return samples_; }

  ProfileSample at(double eta) const {
    if (eta < samples_.front().eta || eta > samples_.back().eta)
      throw std::out_of_range("oracle profile evaluated outside its domain");
    auto it = std::upper_bound(samples_.begin(), samples_.end(), eta,
                               [](double x, const ProfileSample& s) { return x < s.eta; });
    std::size_t i = static_cast<std::size_t>(it - samples_.begin());
    i = std::clamp<std::size_t>(i, 1, samples_.size() - 1);
    const ProfileSample& a = samples_[i - 1];
    const ProfileSample& b = samples_[i];
    const double h = b.eta - a.eta;
    const double t = (eta - a.eta) / h;
    const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
    const double h10 = t * (1 - t) * (1 - t);
    const double h01 = t * t * (3 - 2 * t);
    const double h11 = t * t * (t - 1);
    // w' from the ODE would need f; linear w is enough for the comparisons made here.
    return {eta,
            h00 * a.f + h10 * h * a.u + h01 * b.f + h11 * h * b.u,
            h00 * a.u + h10 * h * a.w + h01 * b.u + h11 * h * b.w,
            (1 - t) * a.w + t * b.w};
  }

 private:
  std::vector<ProfileSample> samples_;
};

struct ShootingConfig {
  double step = 1e-3;
  double tol = 1e-10;
  double bisect_width = 1e-6;
  std::size_t max_iters = 200;
};

struct ShootingResult {
  double alpha = 0.0;
  double residual = 0.0;
  std::size_t iterations = 0;
  Profile profile;
};

class ShootingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline double signum(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace detail

/// Far-field mismatch u(eta_inf; alpha) - u_inf, made monotone in alpha:
/// the side of the root is decided by the first trajectory event (overshoot
/// past the far-field value or turning back short of it), and magnitudes are
/// saturated at 1. Trajectories that overshoot and then return, or turn back
/// and then run away, keep the sign of their first event.
inline double shooting_map(const FlowParams& params, double alpha, double step) {
  const IvpResult r = integrate_ivp(params, alpha, step);
  const BcValues bc = bc_values(params);
  const double dir = bc.u_at_inf >= bc.u_at_0 ? 1.0 : -1.0;
  const double terminal = r.terminal.u - bc.u_at_inf;

  double side;
  if (r.overshoot_at) {
    side = dir;
  } else if (r.turn_at) {
    side = -dir;
  } else {
    side = detail::signum(terminal);
    if (side == 0.0) return 0.0;
  }
  if (r.blew_up() || !std::isfinite(terminal) || detail::signum(terminal) != side) return side;
  return side * std::min(std::abs(terminal), 1.0);
}

namespace detail {

inline double mismatch(const FlowParams& params, double alpha, double step) {
  return shooting_map(params, alpha, step);
}

}  // namespace detail

inline ShootingResult solve_shooting(const FlowParams& params, const ShootingConfig& cfg) {
  if (!(cfg.tol > 0.0)) throw std::invalid_argument("shooting tolerance must be positive");
  double lo = 0.0, hi = 5.0;
  double glo = detail::mismatch(params, lo, cfg.step);
  double ghi = detail::mismatch(params, hi, cfg.step);
  if (glo * ghi > 0.0) {
    const double g0 = glo, g5 = ghi;
    lo = -2.0;
    hi = 10.0;
    glo = detail::mismatch(params, lo, cfg.step);
    ghi = detail::mismatch(params, hi, cfg.step);
    if (glo * ghi > 0.0)
      throw ShootingError("no sign change of the far-field mismatch: g(0)=" + std::to_string(g0) +
                          ", g(5)=" + std::to_string(g5) + ", g(-2)=" + std::to_string(glo) +
                          ", g(10)=" + std::to_string(ghi));
  }

  ShootingResult res;
  auto accept = [&](double alpha, double /*g*/) {
    res.alpha = alpha;
    std::vector<ProfileSample> samples;
    const IvpResult r = integrate_ivp(params, alpha, cfg.step, &samples);
    res.residual = r.terminal.u - bc_values(params).u_at_inf;
    res.profile = Profile(std::move(samples));
    return res;
  };
  if (std::abs(glo) <= cfg.tol) return accept(lo, glo);
  if (std::abs(ghi) <= cfg.tol) return accept(hi, ghi);

  while (hi - lo > cfg.bisect_width) {
    if (++res.iterations > cfg.max_iters) throw ShootingError("bisection exceeded the iteration cap");
    const double mid = 0.5 * (lo + hi);
    const double gm = detail::mismatch(params, mid, cfg.step);
    if (gm == 0.0) return accept(mid, gm);
    if ((gm < 0.0) == (glo < 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
      ghi = gm;
    }
  }

  // Secant on the two latest iterates; a step leaving the bracket is replaced by bisection.
  double prev = lo, gprev = glo;
  double best = hi, gbest = ghi;
  if (std::abs(glo) < std::abs(ghi)) std::swap(prev, best), std::swap(gprev, gbest);
  while (std::abs(gbest) > cfg.tol) {
    if (++res.iterations > cfg.max_iters)
      throw ShootingError("secant refinement stalled at residual " + std::to_string(gbest));
    double x = gbest != gprev ? best - gbest * (best - prev) / (gbest - gprev) : 0.5 * (lo + hi);
    if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
    const double gx = detail::mismatch(params, x, cfg.step);
    if ((gx < 0.0) == (glo < 0.0)) {
      lo = x;
      glo = gx;
    } else {
      hi = x;
      ghi = gx;
    }
    prev = best;
    gprev = gbest;
    best = x;
    gbest = gx;
    if (!(hi > lo)) break;
  }
  return accept(best, gbest);
}

inline ShootingResult solve_shooting(const FlowParams& params, double tol = 1e-10) {
  ShootingConfig cfg;
  cfg.tol = tol;
  return solve_shooting(params, cfg);
}

}  // namespace skanfem::oracle
