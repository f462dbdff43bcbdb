#pragma once

// Galerkin assembly of the two linearized systems solved per nonlinear
// iteration. Both live on P1 hat functions, so every matrix is tridiagonal.
//
//   u-system:  -(u', v') + (f^n u', v) - c beta (u^n u, v) = rhs(v)
//   f-system:  (f', v) = (u, v)          v(0) = 0

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "skanfem/mesh.hpp"
#include "skanfem/quadrature.hpp"

namespace skanfem {

/// How the quadratic reaction term beta (1 - u^2) is linearized about u^n.
///   PicardProduct: -beta u^n u^{n+1} on the left, -beta on the right.
///   NewtonTerm:    -2 beta u^n u^{n+1} on the left, -beta (1 + (u^n)^2) on the right.
/// Both have the nonlinear Galerkin solution as their fixed point.
enum class Linearization { PicardProduct, NewtonTerm };

inline std::string_view to_string(Linearization l) {
  return l == Linearization::NewtonTerm ? "newton" : "picard";
}

inline Linearization parse_linearization(std::string_view s) {
  if (s == "newton") return Linearization::NewtonTerm;
  if (s == "picard") return Linearization::PicardProduct;
  throw std::invalid_argument("unknown linearization '" + std::string(s) + "' (expected newton|picard)");
}

/// Tridiagonal matrix plus right-hand side. Row i holds
/// sub[i] = A(i, i-1), main[i] = A(i, i), super[i] = A(i, i+1);
/// sub[0] and super[n-1] are always zero.
struct BandedSystem {
  explicit BandedSystem(std::size_t n = 0) : sub(n, 0.0), main(n, 0.0), super(n, 0.0), rhs(n, 0.0) {}

  std::size_t n() const noexcept { return main.size(); }

  void add(std::size_t row, std::size_t col, double value) {
    if (col == row) {
      main[row] += value;
    } else if (col + 1 == row) {
      sub[row] += value;
    } else if (col == row + 1) {
      super[row] += value;
    } else {
      throw std::logic_error("entry outside the tridiagonal band");
    }
  }

  double at(std::size_t row, std::size_t col) const {
    if (col == row) return main[row];
    if (col + 1 == row) return sub[row];
    if (col == row + 1) return super[row];
    return 0.0;
  }

  std::vector<double> multiply(std::span<const double> x) const {
    const std::size_t m = n();
    if (x.size() != m) throw std::invalid_argument("matrix-vector size mismatch");
    std::vector<double> y(m);
    for (std::size_t i = 0; i < m; ++i) {
      double s = main[i] * x[i];
      if (i > 0) s += sub[i] * x[i - 1];
      if (i + 1 < m) s += super[i] * x[i + 1];
      y[i] = s;
    }
    return y;
  }

  /// rhs - A x
  std::vector<double> residual(std::span<const double> x) const {
    std::vector<double> r = multiply(x);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = rhs[i] - r[i];
    return r;
  }

  std::vector<double> sub;
  std::vector<double> main;
  std::vector<double> super;
  std::vector<double> rhs;
};

/// Two-point Gauss is exact for every integrand assembled here (degree <= 3
/// when f^n and u^n are piecewise linear).
inline const QuadratureRule& assembly_quadrature() {
  static const QuadratureRule rule = gauss_legendre(2);
  return rule;
}

namespace detail {

struct ElementQp {
  double x;       // physical coordinate
  double w;       // physical weight (includes h/2)
  double phi[2];  // hat values
};

template <class Fn>
void for_each_qp(const Mesh1D& mesh, std::size_t e, const QuadratureRule& rule, Fn&& fn) {
  const double a = mesh.left(e), b = mesh.right(e), h = b - a;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double t = 0.5 * (rule.points[q] + 1.0);
    ElementQp qp{a + t * h, 0.5 * h * rule.weights[q], {1.0 - t, t}};
    fn(qp);
  }
}

inline void check_on_mesh(const Mesh1D& mesh, std::size_t values, const char* what) {
  if (values != mesh.node_count())
    throw std::invalid_argument(std::string(what) + " does not match mesh node count");
}

}  // namespace detail

/// Local 2x2 matrix (row = test, column = trial) and load of one element.
struct ElementContribution {
  std::array<std::array<double, 2>, 2> matrix{};
  std::array<double, 2> rhs{};
};

inline ElementContribution u_element(const Mesh1D& mesh, const NodalField& prev, std::size_t e, double beta,
                                     Linearization lin, const QuadratureRule& rule = assembly_quadrature()) {
  const double h = mesh.h(e);
  const double dphi[2] = {-1.0 / h, 1.0 / h};
  const double reaction = lin == Linearization::NewtonTerm ? 2.0 * beta : beta;
  ElementContribution c;
  detail::for_each_qp(mesh, e, rule, [&](const detail::ElementQp& qp) {
    const double fn = qp.phi[0] * prev.f[e] + qp.phi[1] * prev.f[e + 1];
    const double un = qp.phi[0] * prev.u[e] + qp.phi[1] * prev.u[e + 1];
    const double load = lin == Linearization::NewtonTerm ? beta * (1.0 + un * un) : beta;
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j)
        c.matrix[i][j] +=
            qp.w * (-dphi[j] * dphi[i] + fn * dphi[j] * qp.phi[i] - reaction * un * qp.phi[j] * qp.phi[i]);
      c.rhs[i] -= qp.w * load * qp.phi[i];
    }
  });
  return c;
}

inline ElementContribution f_element(const Mesh1D& mesh, std::span<const double> u, std::size_t e,
                                     const QuadratureRule& rule = assembly_quadrature()) {
  const double h = mesh.h(e);
  const double dphi[2] = {-1.0 / h, 1.0 / h};
  ElementContribution c;
  detail::for_each_qp(mesh, e, rule, [&](const detail::ElementQp& qp) {
    const double uq = qp.phi[0] * u[e] + qp.phi[1] * u[e + 1];
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) c.matrix[i][j] += qp.w * dphi[j] * qp.phi[i];
      c.rhs[i] += qp.w * uq * qp.phi[i];
    }
  });
  return c;
}

inline void scatter(BandedSystem& sys, std::size_t e, const ElementContribution& c) {
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) sys.add(e + i, e + j, c.matrix[i][j]);
    sys.rhs[e + i] += c.rhs[i];
  }
}

inline BandedSystem assemble_u_system(const Mesh1D& mesh, const NodalField& prev, double beta,
                                      Linearization lin) {
  detail::check_on_mesh(mesh, prev.u.size(), "previous iterate");
  detail::check_on_mesh(mesh, prev.f.size(), "previous iterate");
  if (!std::isfinite(beta)) throw std::invalid_argument("beta must be finite");
  BandedSystem sys(mesh.node_count());
  for (std::size_t e = 0; e < mesh.element_count(); ++e) scatter(sys, e, u_element(mesh, prev, e, beta, lin));
  return sys;
}

/// Petrov-Galerkin system for f' = u: trial and test are hats, row 0 is left
/// for the Dirichlet value f(0).
inline BandedSystem assemble_f_system(const Mesh1D& mesh, std::span<const double> u_new) {
  detail::check_on_mesh(mesh, u_new.size(), "u vector");
  BandedSystem sys(mesh.node_count());
  for (std::size_t e = 0; e < mesh.element_count(); ++e) scatter(sys, e, f_element(mesh, u_new, e));
  return sys;
}

/// Replaces row `node` by x[node] = value and moves the column into the
/// neighbouring right-hand sides so the band stays intact.
inline BandedSystem apply_dirichlet(BandedSystem sys, std::size_t node, double value) {
  const std::size_t n = sys.n();
  if (node >= n) throw std::out_of_range("Dirichlet node " + std::to_string(node) + " out of range");
  if (node > 0) {
    sys.rhs[node - 1] -= sys.super[node - 1] * value;
    sys.super[node - 1] = 0.0;
  }
  if (node + 1 < n) {
    sys.rhs[node + 1] -= sys.sub[node + 1] * value;
    sys.sub[node + 1] = 0.0;
  }
  sys.sub[node] = 0.0;
  sys.super[node] = 0.0;
  sys.main[node] = 1.0;
  sys.rhs[node] = value;
  return sys;
}

/// Nonlinear Galerkin residual of the u-equation,
///   R_i = int -u' phi_i' + f u' phi_i + beta (1 - u^2) phi_i,
/// for every node i (boundary rows included; callers drop them as needed).
inline std::vector<double> u_equation_residual(const NodalField& field, double beta) {
  const Mesh1D& mesh = field.mesh;
  const auto& rule = assembly_quadrature();
  std::vector<double> res(mesh.node_count(), 0.0);
  for (std::size_t e = 0; e < mesh.element_count(); ++e) {
    const double h = mesh.h(e);
    const double dphi[2] = {-1.0 / h, 1.0 / h};
    const double du = (field.u[e + 1] - field.u[e]) / h;
    detail::for_each_qp(mesh, e, rule, [&](const detail::ElementQp& qp) {
      const double f = qp.phi[0] * field.f[e] + qp.phi[1] * field.f[e + 1];
      const double u = qp.phi[0] * field.u[e] + qp.phi[1] * field.u[e + 1];
      for (int i = 0; i < 2; ++i)
        res[e + i] += qp.w * (-du * dphi[i] + f * du * qp.phi[i] + beta * (1.0 - u * u) * qp.phi[i]);
    });
  }
  return res;
}

}  // namespace skanfem
