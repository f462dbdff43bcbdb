#pragma once

// Adaptive driver: solve -> estimate -> check -> mark -> (coarsen) -> refine -> transfer.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "skanfem/kelly.hpp"
#include "skanfem/mesh.hpp"
#include "skanfem/model.hpp"
#include "skanfem/picard.hpp"
#include "skanfem/postproc.hpp"

namespace skanfem {

struct AmrConfig {
  std::size_t max_cycles = 20;
  double tol_error = 1e-6;
  double theta = 0.5;
  bool coarsening = false;
  std::size_t initial_elements = 8;
  double c1 = 1.0;
  double c2 = 0.5;
  PicardConfig picard{};

  void validate() const {
    if (max_cycles < 1) throw std::invalid_argument("max_cycles must be >= 1");
    if (!(tol_error > 0.0)) throw std::invalid_argument("tol_error must be positive");
    if (!(theta > 0.0 && theta <= 1.0)) throw std::invalid_argument("theta must lie in (0, 1]");
    if (initial_elements < 2) throw std::invalid_argument("initial mesh needs at least two elements");
    if (!(c1 >= 0.0) || !(c2 >= 0.0)) throw std::invalid_argument("estimator constants must be non-negative");
    picard.validate();
  }
};

struct CycleRecord {
  std::size_t cycle = 0;
  std::size_t dofs = 0;
  double eta_global = 0.0;
  double fpp0 = 0.0;
  std::size_t picard_iters = 0;
};

enum class Termination { Tolerance, MaxCycles };

inline std::string_view to_string(Termination t) {
  return t == Termination::Tolerance ? "Tolerance" : "MaxCycles";
}

/// Mesh and indicators of one cycle, kept for export.
struct CycleEstimate {
  Mesh1D mesh;
  KellyReport report;
};

struct AdaptiveRunReport {
  std::vector<CycleRecord> cycles;
  std::vector<CycleEstimate> estimates;
  NodalField final_field;
  Mesh1D final_mesh;
  Termination terminated_by = Termination::MaxCycles;
};

class AdaptiveSolveError : public std::runtime_error {
 public:
  AdaptiveSolveError(std::size_t cycle, const std::string& what)
      : std::runtime_error("adaptive cycle " + std::to_string(cycle) + ": " + what), cycle_(cycle) {}
  std::size_t cycle() const noexcept { return cycle_; }

 private:
  std::size_t cycle_;
};

/// Marks every element with eta^2 >= theta * max eta^2. Ties at the maximum
/// are always marked, so theta = 1 still makes progress.
inline RefinementFlags mark(const KellyReport& report, double theta) {
  if (report.indicators.empty()) throw std::invalid_argument("cannot mark an empty indicator set");
  if (!(theta > 0.0 && theta <= 1.0)) throw std::invalid_argument("theta must lie in (0, 1]");
  const std::vector<double> sq = report.squared();
  const double max_sq = *std::max_element(sq.begin(), sq.end());
  RefinementFlags flags;
  if (!(max_sq > 0.0)) return flags;
  const double cut = theta * max_sq;
  for (std::size_t e = 0; e < sq.size(); ++e)
    if (sq[e] >= cut || sq[e] == max_sq) flags.marked.push_back(e);
  return flags;
}

namespace detail {

/// Squared-indicator threshold for merging: twice the 10th percentile.
inline double bottom_decile_threshold(std::vector<double> sq) {
  std::sort(sq.begin(), sq.end());
  const std::size_t k = sq.size() / 10;
  return 2.0 * sq[k];
}

}  // namespace detail

inline AdaptiveRunReport run_adaptive(const FlowParams& params, const AmrConfig& cfg) {
  cfg.validate();
  Mesh1D mesh = uniform_mesh(0.0, params.eta_inf(), cfg.initial_elements);
  NodalField guess = initial_guess(mesh, bc_values(params));

  std::vector<CycleRecord> cycles;
  std::vector<CycleEstimate> estimates;
  for (std::size_t cycle = 0;; ++cycle) {
    PicardOutcome solved = [&] {
      try {
        return picard_solve(mesh, params, guess, cfg.picard);
      } catch (const std::exception& e) {
        throw AdaptiveSolveError(cycle, e.what());
      }
    }();
    if (!solved.report.converged) {
      const double last = solved.report.update_history.empty() ? 0.0 : solved.report.update_history.back();
      throw AdaptiveSolveError(cycle, "nonlinear iteration did not converge in " +
                                          std::to_string(solved.report.iterations) +
                                          " iterations (last relative update " + format_double(last) + ")");
    }

    KellyReport est = estimate(solved.field, params, cfg.c1, cfg.c2);
    cycles.push_back({cycle, mesh.node_count(), est.global, wall_gradient(solved.field), solved.report.iterations});
    estimates.push_back({mesh, est});

    std::optional<Termination> done;
    if (est.global < cfg.tol_error) {
      done = Termination::Tolerance;
    } else if (cycle + 1 >= cfg.max_cycles) {
      done = Termination::MaxCycles;
    }
    RefinementFlags flags;
    if (!done) {
      flags = mark(est, cfg.theta);
      if (flags.empty()) done = Termination::Tolerance;
    }
    if (done) {
      return {std::move(cycles), std::move(estimates), solved.field, mesh, *done};
    }

    NodalField current = std::move(solved.field);
    if (cfg.coarsening && mesh.element_count() > 1) {
      const std::vector<double> sq = est.squared();
      CoarsenResult c = coarsen(mesh, current, sq, detail::bottom_decile_threshold(sq), flags);
      std::vector<std::size_t> remapped;
      remapped.reserve(flags.size());
      for (std::size_t e : flags.marked) remapped.push_back(c.element_map[e]);
      flags = RefinementFlags::from(std::move(remapped));
      mesh = std::move(c.mesh);
      current = std::move(c.field);
    }
    Mesh1D next = refine(mesh, flags);
    guess = transfer(current, next);
    mesh = std::move(next);
  }
}

}  // namespace skanfem
