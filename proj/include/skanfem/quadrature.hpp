#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace skanfem {

/// Gauss-Legendre rule on the reference element [-1, 1].
struct QuadratureRule {
  std::vector<double> points;
  std::vector<double> weights;

  std::size_t size() const noexcept { return points.size(); }
  /// Highest polynomial degree integrated exactly.
  int degree() const noexcept { return 2 * static_cast<int>(points.size()) - 1; }

  /// Integrates g over [a, b] by the affine map from the reference element.
  template <class Fn>
  double integrate(double a, double b, Fn&& g) const {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double s = 0.0;
    for (std::size_t q = 0; q < points.size(); ++q) s += weights[q] * g(mid + half * points[q]);
    return half * s;
  }
};

inline QuadratureRule gauss_legendre(int npoints) {
  switch (npoints) {
    case 1:
      return {{0.0}, {2.0}};
    case 2: {
      const double x = 1.0 / std::sqrt(3.0);
      return {{-x, x}, {1.0, 1.0}};
    }
    case 3: {
      const double x = std::sqrt(3.0 / 5.0);
      return {{-x, 0.0, x}, {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0}};
    }
    case 4: {
      const double a = std::sqrt(3.0 / 7.0 - 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
      const double b = std::sqrt(3.0 / 7.0 + 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
      const double wa = (18.0 + std::sqrt(30.0)) / 36.0;
      const double wb = (18.0 - std::sqrt(30.0)) / 36.0;
      return {{-b, -a, a, b}, {wb, wa, wa, wb}};
    }
    case 5: {
      const double a = std::sqrt(5.0 - 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
      const double b = std::sqrt(5.0 + 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
      const double wa = (322.0 + 13.0 * std::sqrt(70.0)) / 900.0;
      const double wb = (322.0 - 13.0 * std::sqrt(70.0)) / 900.0;
      return {{-b, -a, 0.0, a, b}, {wb, wa, 128.0 / 225.0, wa, wb}};
    }
    default:
      throw std::invalid_argument("gauss_legendre supports 1..5 points");
  }
}

}  // namespace skanfem
