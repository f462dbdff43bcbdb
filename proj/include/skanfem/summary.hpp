#pragma once

// Per-run summary and its JSON form:
//   params{m,beta,eta_inf,bc}, cycles[{cycle,dofs,eta_global,fpp0,picard_iters}],
//   fpp0_final, oracle_alpha, agreement, terminated_by

#include <cmath>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "skanfem/adapt.hpp"
#include "skanfem/model.hpp"
#include "skanfem/postproc.hpp"

namespace skanfem {

struct RunSummary {
  FlowParams params;
  std::vector<CycleRecord> cycles;
  double fpp0_final = 0.0;
  std::optional<double> oracle_alpha;
  std::optional<double> agreement;  // |fpp0_final - oracle_alpha|, present iff oracle_alpha is
  Termination terminated_by = Termination::MaxCycles;
};

inline RunSummary make_summary(const FlowParams& params, const AdaptiveRunReport& report,
                               std::optional<double> oracle_alpha) {
  RunSummary s{params, report.cycles, report.cycles.back().fpp0, oracle_alpha, std::nullopt, report.terminated_by};
  if (oracle_alpha) s.agreement = std::abs(s.fpp0_final - *oracle_alpha);
  return s;
}

inline nlohmann::ordered_json to_json(const RunSummary& s) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["params"] = {{"m", s.params.m()},
                 {"beta", s.params.beta()},
                 {"eta_inf", s.params.eta_inf()},
                 {"bc", std::string(to_string(s.params.bc_variant()))}};
  ordered_json cycles = ordered_json::array();
  for (const CycleRecord& c : s.cycles) {
    cycles.push_back({{"cycle", c.cycle},
                      {"dofs", c.dofs},
                      {"eta_global", c.eta_global},
                      {"fpp0", c.fpp0},
                      {"picard_iters", c.picard_iters}});
  }
  j["cycles"] = std::move(cycles);
  j["fpp0_final"] = s.fpp0_final;
  j["oracle_alpha"] = s.oracle_alpha ? ordered_json(*s.oracle_alpha) : ordered_json(nullptr);
  j["agreement"] = s.agreement ? ordered_json(*s.agreement) : ordered_json(nullptr);
  j["terminated_by"] = std::string(to_string(s.terminated_by));
  return j;
}

inline void export_summary(const RunSummary& s, const std::filesystem::path& path) {
  detail::write_text_file(path, to_json(s).dump(2) + "\n");
}

}  // namespace skanfem
