#pragma once

// Kelly-type a-posteriori indicators for the u-equation:
//
//   eta_K^2 = c1 h_K^2 ||R||^2_{L2(K)} + c2 h_K sum_{interior nodes xi of K} [[u_h']](xi)^2
//
// with R = f_h u_h' + beta (1 - u_h^2), since u_h'' vanishes on P1 elements.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "skanfem/mesh.hpp"
#include "skanfem/model.hpp"
#include "skanfem/quadrature.hpp"

namespace skanfem {

struct KellyReport {
  std::vector<double> indicators;  // eta_K >= 0 per element
  double global = 0.0;             // sqrt(sum eta_K^2)
  double c1 = 1.0;
  double c2 = 0.5;

  std::vector<double> squared() const {
    std::vector<double> s(indicators.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = indicators[i] * indicators[i];
    return s;
  }

  double max_indicator() const {
    return indicators.empty() ? 0.0 : *std::max_element(indicators.begin(), indicators.end());
  }
};

/// u_h'(xi+) - u_h'(xi-) at an interior node.
inline double jump_of_derivative(const NodalField& field, std::size_t node) {
  const Mesh1D& m = field.mesh;
  if (node == 0 || node + 1 >= m.node_count())
    throw std::invalid_argument("derivative jump requested at boundary node " + std::to_string(node));
  const double left = (field.u[node] - field.u[node - 1]) / m.h(node - 1);
  const double right = (field.u[node + 1] - field.u[node]) / m.h(node);
  return right - left;
}

/// R^2 is a quartic on the element, so three Gauss points integrate it exactly.
inline double element_residual_norm(const NodalField& field, const FlowParams& params, std::size_t element) {
  const Mesh1D& m = field.mesh;
  if (element >= m.element_count()) throw std::out_of_range("element index out of range");
  static const QuadratureRule rule = gauss_legendre(3);
  const double a = m.left(element), b = m.right(element), h = b - a;
  const double du = (field.u[element + 1] - field.u[element]) / h;
  const double beta = params.beta();
  const double sq = rule.integrate(a, b, [&](double x) {
    const double t = (x - a) / h;
    const double f = (1.0 - t) * field.f[element] + t * field.f[element + 1];
    const double u = (1.0 - t) * field.u[element] + t * field.u[element + 1];
    const double r = f * du + beta * (1.0 - u * u);
    return r * r;
  });
  return std::sqrt(sq);
}

inline KellyReport estimate(const NodalField& field, const FlowParams& params, double c1, double c2) {
  if (!(c1 >= 0.0) || !(c2 >= 0.0)) throw std::invalid_argument("estimator constants must be non-negative");
  const Mesh1D& m = field.mesh;
  const std::size_t ne = m.element_count();

  std::vector<double> jump_sq(m.node_count(), 0.0);
  for (std::size_t i = 1; i + 1 < m.node_count(); ++i) {
    const double j = jump_of_derivative(field, i);
    jump_sq[i] = j * j;
  }

  KellyReport rep;
  rep.c1 = c1;
  rep.c2 = c2;
  rep.indicators.resize(ne);
  double total = 0.0;
  for (std::size_t e = 0; e < ne; ++e) {
    const double h = m.h(e);
    const double r = element_residual_norm(field, params, e);
    const double eta_sq = c1 * h * h * r * r + c2 * h * (jump_sq[e] + jump_sq[e + 1]);
    rep.indicators[e] = std::sqrt(eta_sq);
    total += eta_sq;
  }
  rep.global = std::sqrt(total);
  return rep;
}

}  // namespace skanfem
