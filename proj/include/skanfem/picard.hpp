#pragma once

// Segregated fixed-point iteration on a fixed mesh: each sweep solves the
// linearized u-equation with (f^n, u^n) frozen, then recovers f from
// f' = u with f(0) = 0.

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "skanfem/assembly.hpp"
#include "skanfem/linsolve.hpp"
#include "skanfem/mesh.hpp"
#include "skanfem/model.hpp"

namespace skanfem {

struct PicardConfig {
  std::size_t max_iters = 50;
  double tol = 1e-12;
  double damping = 1.0;
  Linearization linearization = Linearization::NewtonTerm;
  bool use_krylov = true;  // false: direct solver for the u-system too
  KrylovConfig krylov{};
  /// Called with every constrained u-system and the solution returned for it.
  std::function<void(const BandedSystem&, std::span<const double>)> on_u_solve{};

  void validate() const {
    if (max_iters < 1) throw std::invalid_argument("Picard max_iters must be >= 1");
    if (!(tol > 0.0)) throw std::invalid_argument("Picard tolerance must be positive");
    if (!(damping > 0.0 && damping <= 1.0)) throw std::invalid_argument("Picard damping must lie in (0, 1]");
    if (use_krylov) krylov.validate();
  }
};

struct PicardReport {
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> update_history;
};

struct PicardOutcome {
  NodalField field;
  PicardReport report;
};

/// u linear between the boundary values; f its exact antiderivative with f(0) = 0.
inline NodalField initial_guess(const Mesh1D& mesh, const BcValues& bc) {
  const double a = mesh.a(), len = mesh.b() - mesh.a();
  const double slope = (bc.u_at_inf - bc.u_at_0) / len;
  std::vector<double> f(mesh.node_count()), u(mesh.node_count());
  for (std::size_t i = 0; i < mesh.node_count(); ++i) {
    const double s = mesh.nodes()[i] - a;
    u[i] = bc.u_at_0 + slope * s;
    f[i] = bc.f_at_0 + bc.u_at_0 * s + 0.5 * slope * s * s;
  }
  return NodalField(mesh, std::move(f), std::move(u));
}

inline std::vector<double> solve_u_step(const NodalField& prev, const FlowParams& params, const BcValues& bc,
                                        const PicardConfig& cfg) {
  const Mesh1D& mesh = prev.mesh;
  BandedSystem sys = assemble_u_system(mesh, prev, params.beta(), cfg.linearization);
  sys = apply_dirichlet(std::move(sys), 0, bc.u_at_0);
  sys = apply_dirichlet(std::move(sys), mesh.node_count() - 1, bc.u_at_inf);
  std::vector<double> u = cfg.use_krylov ? solve_krylov(sys, prev.u, cfg.krylov).x : solve_direct(sys);
  if (cfg.on_u_solve) cfg.on_u_solve(sys, u);
  return u;
}

inline std::vector<double> solve_f_step(const Mesh1D& mesh, std::span<const double> u, const BcValues& bc) {
  return solve_direct(apply_dirichlet(assemble_f_system(mesh, u), 0, bc.f_at_0));
}

inline PicardOutcome picard_solve(const Mesh1D& mesh, const FlowParams& params, const NodalField& init,
                                  const PicardConfig& cfg) {
  cfg.validate();
  if (!(init.mesh == mesh)) throw std::invalid_argument("initial field is not defined on the solve mesh");
  const BcValues bc = bc_values(params);

  NodalField cur = init;
  PicardReport report;
  const std::size_t n = mesh.node_count();
  while (report.iterations < cfg.max_iters && !report.converged) {
    std::vector<double> u_new = solve_u_step(cur, params, bc, cfg);
    std::vector<double> f_new = solve_f_step(mesh, u_new, bc);

    double diff2 = 0.0, norm2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double f_next = (1.0 - cfg.damping) * cur.f[i] + cfg.damping * f_new[i];
      const double u_next = (1.0 - cfg.damping) * cur.u[i] + cfg.damping * u_new[i];
      diff2 += (f_next - cur.f[i]) * (f_next - cur.f[i]) + (u_next - cur.u[i]) * (u_next - cur.u[i]);
      norm2 += f_next * f_next + u_next * u_next;
      cur.f[i] = f_next;
      cur.u[i] = u_next;
    }
    const double rel = norm2 > 0.0 ? std::sqrt(diff2 / norm2) : std::sqrt(diff2);
    if (!std::isfinite(rel)) throw std::runtime_error("Picard iterate became non-finite");
    report.update_history.push_back(rel);
    ++report.iterations;
    report.converged = rel < cfg.tol;
  }
  return {std::move(cur), std::move(report)};
}

}  // namespace skanfem
