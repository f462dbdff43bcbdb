#pragma once

// Command-line front end: `solve`, `sweep` and `oracle` subcommands.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "skanfem/adapt.hpp"
#include "skanfem/model.hpp"
#include "skanfem/oracle.hpp"
#include "skanfem/postproc.hpp"
#include "skanfem/summary.hpp"

namespace skanfem::cli {

enum class Command { Solve, Sweep, Oracle };

inline const std::vector<double>& table_m_grid() {
  static const std::vector<double> grid{0.0, 0.2, 0.5, 0.8, 1.0, 1.5, 3.0, 7.0, 10.0, 20.0, 100.0};
  return grid;
}

struct CliConfig {
  Command command = Command::Solve;
  std::optional<double> m;
  std::optional<double> beta;
  std::vector<double> m_list = table_m_grid();

  double eta_inf = 8.0;
  std::size_t n0 = 8;
  std::size_t max_cycles = 20;
  double tol_error = 1e-6;
  double tol_picard = 1e-12;
  std::size_t max_picard = 50;
  double damping = 1.0;
  double theta = 0.5;
  double c1 = 1.0;
  double c2 = 0.5;
  std::string linearization = "newton";
  std::string bc = "wedge";
  bool krylov = true;
  double krylov_tol = 1e-13;
  std::size_t restart = 30;
  double omega = 1.0;
  bool coarsen = false;

  std::filesystem::path out_dir = "skanfem-out";
  bool emit_profile = true;
  bool emit_indicators = true;
  bool emit_summary = true;
};

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kSolverFailure = 1;
inline constexpr int kUsage = 2;
inline constexpr int kIoFailure = 3;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline FlowParams flow_params(const CliConfig& c, std::optional<double> m_override = std::nullopt) {
  try {
    const BcVariant bc = parse_bc_variant(c.bc);
    if (m_override) return FlowParams::from_m(*m_override, c.eta_inf, bc);
    if (c.m && c.beta) throw UsageError("give either --m or --beta, not both");
    if (c.beta) return FlowParams::from_beta(*c.beta, c.eta_inf, bc);
    if (c.m) return FlowParams::from_m(*c.m, c.eta_inf, bc);
    throw UsageError("one of --m or --beta is required");
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
}

inline AmrConfig amr_config(const CliConfig& c) {
  AmrConfig a;
  a.max_cycles = c.max_cycles;
  a.tol_error = c.tol_error;
  a.theta = c.theta;
  a.coarsening = c.coarsen;
  a.initial_elements = c.n0;
  a.c1 = c.c1;
  a.c2 = c.c2;
  a.picard.max_iters = c.max_picard;
  a.picard.tol = c.tol_picard;
  a.picard.damping = c.damping;
  a.picard.use_krylov = c.krylov;
  a.picard.krylov.tol = c.krylov_tol;
  a.picard.krylov.restart = c.restart;
  a.picard.krylov.relaxation = c.omega;
  try {
    a.picard.linearization = parse_linearization(c.linearization);
    a.validate();
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  return a;
}

inline bool ensure_out_dir(const std::filesystem::path& dir, std::ostream& err) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    err << "error: cannot create output directory '" << dir.string() << "': " << ec.message() << "\n";
    return false;
  }
  return true;
}

inline int run_solve(const CliConfig& c, std::ostream& out, std::ostream& err) {
  FlowParams params = FlowParams::from_m(0.0);
  AmrConfig amr;
  try {
    params = flow_params(c);
    amr = amr_config(c);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }
  if (!ensure_out_dir(c.out_dir, err)) return kIoFailure;

  const AdaptiveRunReport report = run_adaptive(params, amr);
  std::optional<double> alpha;
  try {
    alpha = oracle::solve_shooting(params).alpha;
  } catch (const std::exception& e) {
    err << "warning: shooting oracle failed: " << e.what() << "\n";
  }

  const RunSummary summary = make_summary(params, report, alpha);
  try {
    if (c.emit_profile) export_profile(report.final_field, c.out_dir / "profile.csv");
    if (c.emit_indicators)
      for (std::size_t k = 0; k < report.estimates.size(); ++k)
        export_indicators(report.estimates[k].report, report.estimates[k].mesh, k,
                          c.out_dir / ("indicators_cycle_" + std::to_string(k) + ".csv"));
    if (c.emit_summary) export_summary(summary, c.out_dir / "summary.json");
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kIoFailure;
  }

  out << "m=" << format_double(params.m()) << " beta=" << format_double(params.beta())
      << " cycles=" << report.cycles.size() << " dofs=" << report.cycles.back().dofs
      << " eta_global=" << format_double(report.cycles.back().eta_global)
      << " f''(0)=" << format_double(summary.fpp0_final);
  if (alpha) out << " oracle=" << format_double(*alpha) << " |diff|=" << format_double(*summary.agreement);
  out << " terminated_by=" << to_string(report.terminated_by) << "\n";
  return kOk;
}

struct SweepRow {
  double m = 0.0;
  double beta = std::nan("");
  double fpp0 = std::nan("");
  double oracle_alpha = std::nan("");
  std::string error;
};

inline std::size_t sweep_threads(std::size_t jobs) {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SKANFEM_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) n = static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
  }
  return std::clamp<std::size_t>(n, 1, std::max<std::size_t>(jobs, 1));
}

inline SweepRow sweep_one(const CliConfig& c, const AmrConfig& amr, double m) {
  SweepRow row;
  row.m = m;
  try {
    const FlowParams p = flow_params(c, m);
    row.beta = p.beta();
    try {
      row.oracle_alpha = oracle::solve_shooting(p).alpha;
    } catch (const std::exception& e) {
      row.error = std::string("oracle: ") + e.what();
    }
    row.fpp0 = run_adaptive(p, amr).cycles.back().fpp0;
  } catch (const std::exception& e) {
    row.error += (row.error.empty() ? "" : "; ") + std::string(e.what());
  }
  return row;
}

inline std::vector<SweepRow> run_sweep_rows(const CliConfig& c, const AmrConfig& amr) {
  std::vector<SweepRow> rows(c.m_list.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) rows[i] = sweep_one(c, amr, c.m_list[i]);
  };
  const std::size_t nthreads = sweep_threads(rows.size());
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  }
  return rows;
}

inline int run_sweep(const CliConfig& c, std::ostream& out, std::ostream& err) {
  AmrConfig amr;
  try {
    if (c.m_list.empty()) throw UsageError("--m-list must name at least one m");
    parse_bc_variant(c.bc);
    amr = amr_config(c);
  } catch (const std::exception& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }
  if (!ensure_out_dir(c.out_dir, err)) return kIoFailure;

  const std::vector<SweepRow> rows = run_sweep_rows(c, amr);
  std::string table = "m,beta,fpp0,oracle_alpha,abs_diff\n";
  bool any_failed = false;
  for (const SweepRow& r : rows) {
    const double diff = std::abs(r.fpp0 - r.oracle_alpha);
    table += format_double(r.m) + ',' + format_double(r.beta) + ',' + format_double(r.fpp0) + ',' +
             format_double(r.oracle_alpha) + ',' + format_double(diff) + '\n';
    if (!r.error.empty()) {
      any_failed = true;
      err << "m=" << format_double(r.m) << ": " << r.error << "\n";
    }
    out << "m=" << format_double(r.m) << " f''(0)=" << format_double(r.fpp0)
        << " oracle=" << format_double(r.oracle_alpha) << "\n";
  }
  try {
    detail::write_text_file(c.out_dir / "table.csv", table);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kIoFailure;
  }
  return any_failed ? kSolverFailure : kOk;
}

inline int run_oracle(const CliConfig& c, std::ostream& out, std::ostream& err) {
  FlowParams params = FlowParams::from_m(0.0);
  try {
    params = flow_params(c);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }
  oracle::ShootingResult res;
  try {
    res = oracle::solve_shooting(params);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kSolverFailure;
  }
  out << "alpha=" << format_double(res.alpha) << " residual=" << format_double(res.residual)
      << " iterations=" << res.iterations << "\n";
  if (c.emit_profile) {
    if (!ensure_out_dir(c.out_dir, err)) return kIoFailure;
    std::vector<double> eta, f, u;
    for (const auto& s : res.profile.samples()) {
      eta.push_back(s.eta);
      f.push_back(s.f);
      u.push_back(s.u);
    }
    try {
      export_profile(NodalField(Mesh1D(std::move(eta)), std::move(f), std::move(u)),
                     c.out_dir / "oracle_profile.csv");
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return kIoFailure;
    }
  }
  return kOk;
}

namespace detail {

inline void add_params_options(CLI::App& app, CliConfig& c, std::optional<double>& m, std::optional<double>& beta) {
  app.add_option("--m", m, "Wedge exponent m (beta = 2m/(m+1))");
  app.add_option("--beta", beta, "Pressure-gradient parameter beta (< 2); m = beta/(2-beta)");
  app.add_option("--eta-inf", c.eta_inf, "Domain truncation eta_inf")->capture_default_str();
  app.add_option("--bc", c.bc, "Boundary conditions: wedge (u(0)=0, u(inf)=1) | stretching (beta = 0 only)")
      ->capture_default_str();
}

inline void add_solver_options(CLI::App& app, CliConfig& c) {
  app.add_option("--n0", c.n0, "Elements in the initial uniform mesh")->capture_default_str();
  app.add_option("--max-cycles", c.max_cycles, "Maximum adaptive cycles")->capture_default_str();
  app.add_option("--tol-error", c.tol_error, "Global estimator tolerance")->capture_default_str();
  app.add_option("--tol-picard", c.tol_picard, "Relative update tolerance of the nonlinear iteration")
      ->capture_default_str();
  app.add_option("--max-picard", c.max_picard, "Maximum nonlinear iterations per cycle")->capture_default_str();
  app.add_option("--damping", c.damping, "Nonlinear update damping in (0, 1]")->capture_default_str();
  app.add_option("--theta", c.theta, "Marking fraction in (0, 1]")->capture_default_str();
  app.add_option("--c1", c.c1, "Estimator residual constant")->capture_default_str();
  app.add_option("--c2", c.c2, "Estimator jump constant")->capture_default_str();
  app.add_option("--linearization", c.linearization, "Reaction-term linearization: newton | picard")
      ->capture_default_str();
  app.add_flag("--krylov,!--direct-only", c.krylov, "GMRES+SSOR for the u-system (default) or direct solves only");
  app.add_option("--krylov-tol", c.krylov_tol, "GMRES relative residual tolerance")->capture_default_str();
  app.add_option("--restart", c.restart, "GMRES restart length")->capture_default_str();
  app.add_option("--omega", c.omega, "SSOR relaxation in (0, 2)")->capture_default_str();
  app.add_flag("--coarsen", c.coarsen, "Enable coarsening of low-indicator element pairs");
}

inline void add_output_options(CLI::App& app, CliConfig& c) {
  app.add_option("--out-dir", c.out_dir, "Output directory")->capture_default_str();
  app.add_flag("--profile,!--no-profile", c.emit_profile, "Write the profile CSV");
}

}  // namespace detail

/// Parses argv and runs the selected subcommand; returns the process exit code.
inline int main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CliConfig c;
  std::optional<double> m, beta;

  CLI::App app{"Adaptive finite element solver for the Falkner-Skan boundary-layer equation"};
  app.require_subcommand(1);

  CLI::App* solve = app.add_subcommand("solve", "Adaptive solve for one m (or beta)");
  detail::add_params_options(*solve, c, m, beta);
  detail::add_solver_options(*solve, c);
  detail::add_output_options(*solve, c);
  solve->add_flag("--indicators,!--no-indicators", c.emit_indicators, "Write indicators_cycle_<k>.csv");
  solve->add_flag("--summary,!--no-summary", c.emit_summary, "Write summary.json");

  CLI::App* sweep = app.add_subcommand("sweep", "Adaptive solves over a list of m, written to table.csv");
  std::optional<double> unused_m, unused_beta;
  detail::add_params_options(*sweep, c, unused_m, unused_beta);
  detail::add_solver_options(*sweep, c);
  sweep->add_option("--out-dir", c.out_dir, "Output directory")->capture_default_str();
  sweep->add_option("--m-list", c.m_list, "Comma-separated wedge exponents")
      ->delimiter(',')
      ->capture_default_str();

  CLI::App* orc = app.add_subcommand("oracle", "Shooting-method reference value of f''(0)");
  detail::add_params_options(*orc, c, m, beta);
  orc->add_option("--out-dir", c.out_dir, "Output directory for oracle_profile.csv")->capture_default_str();
  bool oracle_profile = false;
  orc->add_flag("--profile", oracle_profile, "Write oracle_profile.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  c.m = m;
  c.beta = beta;
  try {
    if (*solve) {
      c.command = Command::Solve;
      return run_solve(c, out, err);
    }
    if (*sweep) {
      if (unused_m || unused_beta) throw UsageError("sweep takes --m-list, not --m/--beta");
      c.command = Command::Sweep;
      return run_sweep(c, out, err);
    }
    c.command = Command::Oracle;
    c.emit_profile = oracle_profile;
    return run_oracle(c, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kSolverFailure;
  }
}

}  // namespace skanfem::cli
