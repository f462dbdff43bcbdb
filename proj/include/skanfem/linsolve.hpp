#pragma once

// Linear solvers for the tridiagonal systems produced by assembly:
// a banded direct solver and restarted GMRES with an SSOR preconditioner.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "skanfem/assembly.hpp"

namespace skanfem {

class SingularMatrixError : public std::runtime_error {
 public:
  SingularMatrixError(std::size_t row, double pivot)
      : std::runtime_error("zero pivot in tridiagonal solve at row " + std::to_string(row) +
                           " (pivot " + std::to_string(pivot) + ")"),
        row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class KrylovConvergenceError : public std::runtime_error {
 public:
  KrylovConvergenceError(std::size_t iterations, double relative_residual)
      : std::runtime_error("GMRES did not converge in " + std::to_string(iterations) +
                           " iterations (relative residual " + std::to_string(relative_residual) + ")"),
        iterations_(iterations),
        relative_residual_(relative_residual) {}
  std::size_t iterations() const noexcept { return iterations_; }
  double relative_residual() const noexcept { return relative_residual_; }

 private:
  std::size_t iterations_;
  double relative_residual_;
};

namespace detail {

inline double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace detail

/// Gaussian elimination with partial (row) pivoting specialised to the
/// tridiagonal band; row swaps fill at most one extra super-diagonal.
inline std::vector<double> solve_direct(const BandedSystem& sys) {
  const std::size_t n = sys.n();
  if (n == 0) return {};
  std::vector<double> d = sys.main;
  std::vector<double> du = sys.super;
  std::vector<double> dl(n, 0.0);  // dl[i] = A(i+1, i); later reused for the fill-in of row i
  for (std::size_t i = 0; i + 1 < n; ++i) dl[i] = sys.sub[i + 1];
  std::vector<double> b = sys.rhs;

  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    scale = std::max({scale, std::abs(sys.main[i]), std::abs(sys.sub[i]), std::abs(sys.super[i])});
  const double tiny = scale * std::numeric_limits<double>::epsilon() * 1e-3;

  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::abs(d[i]) >= std::abs(dl[i])) {
      if (std::abs(d[i]) <= tiny) throw SingularMatrixError(i, d[i]);
      const double fact = dl[i] / d[i];
      d[i + 1] -= fact * du[i];
      b[i + 1] -= fact * b[i];
      dl[i] = 0.0;
    } else {
      const double fact = d[i] / dl[i];
      d[i] = dl[i];
      const double temp = d[i + 1];
      d[i + 1] = du[i] - fact * temp;
      if (i + 2 < n) {
        dl[i] = du[i + 1];
        du[i + 1] = -fact * dl[i];
      } else {
        dl[i] = 0.0;
      }
      du[i] = temp;
      const double tb = b[i];
      b[i] = b[i + 1];
      b[i + 1] = tb - fact * b[i + 1];
    }
  }
  if (std::abs(d[n - 1]) <= tiny) throw SingularMatrixError(n - 1, d[n - 1]);

  std::vector<double> x(n);
  x[n - 1] = b[n - 1] / d[n - 1];
  if (n > 1) x[n - 2] = (b[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
  for (std::size_t k = n - 2; k-- > 0;) x[k] = (b[k] - du[k] * x[k + 1] - dl[k] * x[k + 2]) / d[k];
  return x;
}

struct KrylovConfig {
  double tol = 1e-13;            // preconditioned residual relative to ||M^-1 b||
  std::size_t max_iters = 20000;
  std::size_t restart = 30;
  double relaxation = 1.0;       // SSOR omega

  void validate() const {
    if (!(tol > 0.0)) throw std::invalid_argument("Krylov tolerance must be positive");
    if (restart < 1) throw std::invalid_argument("Krylov restart length must be >= 1");
    if (!(relaxation > 0.0 && relaxation < 2.0)) throw std::invalid_argument("SSOR relaxation must lie in (0, 2)");
    if (max_iters < 1) throw std::invalid_argument("Krylov max_iters must be >= 1");
  }
};

/// M = (D + wL) D^-1 (D + wU) / (w (2 - w)) for the tridiagonal matrix.
class SsorPreconditioner {
 public:
  SsorPreconditioner(const BandedSystem& a, double omega) : a_(&a), omega_(omega) {
    if (!(omega > 0.0 && omega < 2.0)) throw std::invalid_argument("SSOR relaxation must lie in (0, 2)");
    for (std::size_t i = 0; i < a.n(); ++i)
      if (a.main[i] == 0.0) throw SingularMatrixError(i, 0.0);
  }

  std::vector<double> apply(std::span<const double> r) const {
    const BandedSystem& a = *a_;
    const std::size_t n = a.n();
    const double scale = omega_ * (2.0 - omega_);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = scale * r[i];
      if (i > 0) s -= omega_ * a.sub[i] * y[i - 1];
      y[i] = s / a.main[i];
    }
    for (std::size_t i = 0; i < n; ++i) y[i] *= a.main[i];
    for (std::size_t k = n; k-- > 0;) {
      double s = y[k];
      if (k + 1 < n) s -= omega_ * a.super[k] * y[k + 1];
      y[k] = s / a.main[k];
    }
    return y;
  }

 private:
  const BandedSystem* a_;
  double omega_;
};

struct KrylovResult {
  std::vector<double> x;
  std::size_t iterations = 0;
  /// Relative preconditioned residual at the start of every restart cycle,
  /// plus the final value.
  std::vector<double> restart_residuals;
  double relative_residual = 0.0;
};

/// Left-preconditioned restarted GMRES(m) with modified Gram-Schmidt and
/// Givens rotations.
inline KrylovResult solve_krylov(const BandedSystem& sys, std::span<const double> x0, const KrylovConfig& cfg) {
  cfg.validate();
  const std::size_t n = sys.n();
  if (x0.size() != n) throw std::invalid_argument("initial guess size does not match system");
  const SsorPreconditioner prec(sys, cfg.relaxation);

  KrylovResult out;
  out.x.assign(x0.begin(), x0.end());
  const std::vector<double> pb = prec.apply(sys.rhs);
  const double bnorm = detail::norm2(pb);
  if (bnorm == 0.0) {
    out.x.assign(n, 0.0);
    out.restart_residuals.push_back(0.0);
    return out;
  }

  const std::size_t m = std::min(cfg.restart, n);
  std::vector<std::vector<double>> v(m + 1, std::vector<double>(n));
  std::vector<std::vector<double>> h(m + 1, std::vector<double>(m, 0.0));
  std::vector<double> cs(m), sn(m), g(m + 1), y(m);

  while (true) {
    std::vector<double> r = prec.apply(sys.residual(out.x));
    const double rnorm = detail::norm2(r);
    out.relative_residual = rnorm / bnorm;
    out.restart_residuals.push_back(out.relative_residual);
    if (rnorm <= cfg.tol * bnorm) return out;
    if (out.iterations >= cfg.max_iters) throw KrylovConvergenceError(out.iterations, out.relative_residual);

    for (std::size_t i = 0; i < n; ++i) v[0][i] = r[i] / rnorm;
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = rnorm;

    std::size_t k = 0;
    for (std::size_t j = 0; j < m; ++j) {
      std::vector<double> w = prec.apply(sys.multiply(v[j]));
      for (std::size_t i = 0; i <= j; ++i) {
        h[i][j] = detail::dot(w, v[i]);
        for (std::size_t l = 0; l < n; ++l) w[l] -= h[i][j] * v[i][l];
      }
      h[j + 1][j] = detail::norm2(w);
      const bool breakdown = h[j + 1][j] <= 1e-14 * std::abs(h[j][j]);
      if (!breakdown)
        for (std::size_t l = 0; l < n; ++l) v[j + 1][l] = w[l] / h[j + 1][j];

      for (std::size_t i = 0; i < j; ++i) {
        const double t = cs[i] * h[i][j] + sn[i] * h[i + 1][j];
        h[i + 1][j] = -sn[i] * h[i][j] + cs[i] * h[i + 1][j];
        h[i][j] = t;
      }
      const double denom = std::hypot(h[j][j], h[j + 1][j]);
      cs[j] = denom == 0.0 ? 1.0 : h[j][j] / denom;
      sn[j] = denom == 0.0 ? 0.0 : h[j + 1][j] / denom;
      h[j][j] = cs[j] * h[j][j] + sn[j] * h[j + 1][j];
      h[j + 1][j] = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];

      ++out.iterations;
      k = j + 1;
      if (breakdown || std::abs(g[j + 1]) <= cfg.tol * bnorm || out.iterations >= cfg.max_iters) break;
    }

    for (std::size_t i = k; i-- > 0;) {
      double s = g[i];
      for (std::size_t l = i + 1; l < k; ++l) s -= h[i][l] * y[l];
      y[i] = s / h[i][i];
    }
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t l = 0; l < n; ++l) out.x[l] += y[i] * v[i][l];
  }
}

}  // namespace skanfem
