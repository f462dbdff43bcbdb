#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "skanfem/assembly.hpp"
#include "skanfem/linsolve.hpp"
#include "skanfem/oracle.hpp"
#include "test_support.hpp"

namespace skanfem {
namespace {

NodalField constant_field(const Mesh1D& m, double fv, double uv) {
  return NodalField(m, std::vector<double>(m.node_count(), fv), std::vector<double>(m.node_count(), uv));
}

TEST(UElement, StiffnessOnUnitElement) {
  const Mesh1D m = uniform_mesh(0.0, 1.0, 1);
  const ElementContribution c = u_element(m, constant_field(m, 0, 0), 0, 0.0, Linearization::PicardProduct);
  EXPECT_NEAR(c.matrix[0][0], -1.0, 1e-15);
  EXPECT_NEAR(c.matrix[0][1], 1.0, 1e-15);
  EXPECT_NEAR(c.matrix[1][0], 1.0, 1e-15);
  EXPECT_NEAR(c.matrix[1][1], -1.0, 1e-15);
  EXPECT_EQ(c.rhs[0], 0.0);
}

TEST(UElement, MassMatrixFromReactionTerm) {
  const double h = 0.5;
  const Mesh1D m = uniform_mesh(0.0, h, 1);
  const NodalField one = constant_field(m, 0, 1);
  const auto a1 = u_element(m, one, 0, 1.0, Linearization::PicardProduct);
  const auto a0 = u_element(m, one, 0, 0.0, Linearization::PicardProduct);
  // Reaction contributes -(u, v) with u^n = 1, i.e. minus the P1 mass matrix.
  EXPECT_NEAR(a0.matrix[0][0] - a1.matrix[0][0], h / 3.0, 1e-15);
  EXPECT_NEAR(a0.matrix[0][1] - a1.matrix[0][1], h / 6.0, 1e-15);
  EXPECT_NEAR(a0.matrix[1][1] - a1.matrix[1][1], h / 3.0, 1e-15);
  EXPECT_NEAR(a1.rhs[0], -h / 2.0, 1e-15);
}

TEST(UElement, NewtonVariantDoublesReactionAndChangesLoad) {
  const Mesh1D m = uniform_mesh(0.0, 1.0, 1);
  const NodalField w = constant_field(m, 0.3, 0.5);
  const auto p = u_element(m, w, 0, 1.0, Linearization::PicardProduct);
  const auto n = u_element(m, w, 0, 1.0, Linearization::NewtonTerm);
  const auto s = u_element(m, w, 0, 0.0, Linearization::PicardProduct);
  EXPECT_NEAR(n.matrix[0][0] - s.matrix[0][0], 2.0 * (p.matrix[0][0] - s.matrix[0][0]), 1e-15);
  EXPECT_NEAR(n.rhs[0], -1.25 * 0.5, 1e-15);
}

TEST(AssembleU, BetaZeroGivesLinearRamp) {
  const Mesh1D m = uniform_mesh(0.0, 8.0, 8);
  BandedSystem sys = assemble_u_system(m, constant_field(m, 0, 0), 0.0, Linearization::NewtonTerm);
  sys = apply_dirichlet(apply_dirichlet(std::move(sys), 0, 0.0), 8, 1.0);
  const std::vector<double> u = solve_direct(sys);
  for (std::size_t i = 0; i <= 8; ++i) EXPECT_NEAR(u[i], i / 8.0, 1e-14);
}

TEST(AssembleF, ZeroVelocityGivesZeroF) {
  const Mesh1D m = uniform_mesh(0.0, 8.0, 8);
  const std::vector<double> u(9, 0.0);
  const std::vector<double> f = solve_direct(apply_dirichlet(assemble_f_system(m, u), 0, 0.0));
  for (double v : f) EXPECT_NEAR(v, 0.0, 1e-15);
}

TEST(AssembleF, UnitVelocityGivesIdentity) {
  const Mesh1D m = uniform_mesh(0.0, 8.0, 8);
  const std::vector<double> u(9, 1.0);
  const std::vector<double> f = solve_direct(apply_dirichlet(assemble_f_system(m, u), 0, 0.0));
  for (std::size_t i = 0; i <= 8; ++i) EXPECT_NEAR(f[i], static_cast<double>(i), 1e-13);
}

TEST(AssembleF, ConvergesToOracleStreamFunction) {
  const auto sol = oracle::solve_shooting(FlowParams::from_m(1.0));
  auto err = [&](std::size_t n) {
    const Mesh1D m = uniform_mesh(0.0, 8.0, n);
    std::vector<double> u;
    for (double x : m.nodes()) u.push_back(sol.profile.at(x).u);
    const std::vector<double> f = solve_direct(apply_dirichlet(assemble_f_system(m, u), 0, 0.0));
    double e = 0.0;
    for (std::size_t i = 0; i < m.node_count(); ++i) e = std::max(e, std::abs(f[i] - sol.profile.at(m.nodes()[i]).f));
    return e;
  };
  const double e1 = err(32), e2 = err(64);
  EXPECT_LT(e2, 1e-3);
  EXPECT_GE(std::log2(e1 / e2), 1.8);
}

TEST(Dirichlet, ThreeNodeSystems) {
  BandedSystem s(3);
  s.main = {2, 2, 2};
  s.sub = {0, -1, -1};
  s.super = {-1, -1, 0};
  BandedSystem a = apply_dirichlet(apply_dirichlet(s, 0, 0.0), 2, 1.0);
  EXPECT_NEAR(solve_direct(a)[1], 0.5, 1e-15);
  BandedSystem b = apply_dirichlet(apply_dirichlet(s, 0, 2.0), 2, 2.0);
  EXPECT_NEAR(solve_direct(b)[1], 2.0, 1e-15);
  EXPECT_THROW(apply_dirichlet(s, 3, 0.0), std::out_of_range);
}

TEST(BandedSystem, AddOutsideBandThrows) {
  BandedSystem s(4);
  EXPECT_THROW(s.add(0, 2, 1.0), std::logic_error);
}

TEST(AssemblyProperty, ElementOrderDoesNotMatter) {
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  const Mesh1D m = refine(uniform_mesh(0.0, 8.0, 12), RefinementFlags{{0, 1, 4, 9}});
  std::vector<double> f(m.node_count()), u(m.node_count());
  for (auto& x : f) x = val(rng);
  for (auto& x : u) x = val(rng);
  const NodalField w(m, f, u);
  const BandedSystem ref = assemble_u_system(m, w, 0.7, Linearization::NewtonTerm);
  std::vector<std::size_t> order(m.element_count());
  std::iota(order.begin(), order.end(), 0);
  for (int trial = 0; trial < 20; ++trial) {
    std::shuffle(order.begin(), order.end(), rng);
    BandedSystem s(m.node_count());
    for (std::size_t e : order) scatter(s, e, u_element(m, w, e, 0.7, Linearization::NewtonTerm));
    for (std::size_t i = 0; i < m.node_count(); ++i) {
      EXPECT_NEAR(s.main[i], ref.main[i], 1e-13);
      EXPECT_NEAR(s.sub[i], ref.sub[i], 1e-13);
      EXPECT_NEAR(s.super[i], ref.super[i], 1e-13);
      EXPECT_NEAR(s.rhs[i], ref.rhs[i], 1e-13);
    }
  }
}

TEST(AssemblyProperty, FixedPointMatchesNonlinearResidual) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> val(-1.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Mesh1D m = uniform_mesh(0.0, 8.0, 10 + trial);
    std::vector<double> f(m.node_count()), u(m.node_count());
    for (auto& x : f) x = val(rng);
    for (auto& x : u) x = val(rng);
    const NodalField w(m, f, u);
    const std::vector<double> res = u_equation_residual(w, 0.8);
    for (Linearization lin : {Linearization::PicardProduct, Linearization::NewtonTerm}) {
      const BandedSystem s = assemble_u_system(m, w, 0.8, lin);
      const std::vector<double> r = s.residual(u);  // L(w) - A(w) w
      for (std::size_t i = 0; i < m.node_count(); ++i) EXPECT_NEAR(-r[i], res[i], 1e-12);
    }
  }
}

TEST(AssemblyProperty, TwoPointRuleIsExact) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> val(-2.0, 2.0);
  const Mesh1D m = uniform_mesh(0.0, 3.0, 5);
  const QuadratureRule five = gauss_legendre(5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> f(m.node_count()), u(m.node_count());
    for (auto& x : f) x = val(rng);
    for (auto& x : u) x = val(rng);
    const NodalField w(m, f, u);
    for (std::size_t e = 0; e < m.element_count(); ++e) {
      for (Linearization lin : {Linearization::PicardProduct, Linearization::NewtonTerm}) {
        const auto a = u_element(m, w, e, 1.3, lin);
        const auto b = u_element(m, w, e, 1.3, lin, five);
        for (int i = 0; i < 2; ++i) {
          for (int j = 0; j < 2; ++j) EXPECT_NEAR(a.matrix[i][j], b.matrix[i][j], 1e-13);
          EXPECT_NEAR(a.rhs[i], b.rhs[i], 1e-13);
        }
      }
      const auto fa = f_element(m, u, e);
      const auto fb = f_element(m, u, e, five);
      for (int i = 0; i < 2; ++i) EXPECT_NEAR(fa.rhs[i], fb.rhs[i], 1e-13);
    }
  }
}

TEST(Linearization, ParseRoundTrip) {
  EXPECT_EQ(parse_linearization("newton"), Linearization::NewtonTerm);
  EXPECT_EQ(parse_linearization(to_string(Linearization::PicardProduct)), Linearization::PicardProduct);
  EXPECT_THROW(parse_linearization("exact"), std::invalid_argument);
}

}  // namespace
}  // namespace skanfem
