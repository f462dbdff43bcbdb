#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include <json.hpp>

#include "skanfem/adapt.hpp"
#include "skanfem/postproc.hpp"
#include "skanfem/summary.hpp"
#include "test_support.hpp"

namespace skanfem {
namespace {

using testing::scratch_dir;
using testing::slurp;

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

TEST(WallGradient, Examples) {
  const Mesh1D m = uniform_mesh(0.0, 1.0, 4);
  std::vector<double> quad, lin;
  for (double x : m.nodes()) {
    quad.push_back(x * x);
    lin.push_back(3.0 * x);
  }
  EXPECT_NEAR(wall_gradient(NodalField(m, quad, quad)), 0.0, 1e-14);
  EXPECT_NEAR(wall_gradient(NodalField(m, lin, lin)), 3.0, 1e-14);
  const Mesh1D two = uniform_mesh(0.0, 1.0, 2);
  EXPECT_NO_THROW(wall_gradient(NodalField(two, {0, 0, 0}, {0, 0, 0})));
  const Mesh1D one = uniform_mesh(0.0, 1.0, 1);
  EXPECT_THROW(wall_gradient(NodalField(one, {0, 0}, {0, 0})), std::invalid_argument);
}

TEST(WallGradient, ExactForRandomQuadraticsOnUnevenSpacing) {
  std::mt19937_64 rng(1000);
  std::uniform_real_distribution<double> coef(-5.0, 5.0), step(0.01, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const double a = coef(rng), b = coef(rng), c = coef(rng);
    const double h1 = step(rng), h2 = step(rng);
    const Mesh1D m({0.0, h1, h1 + h2, h1 + h2 + 1.0});
    std::vector<double> u;
    for (double x : m.nodes()) u.push_back(a + b * x + c * x * x);
    EXPECT_NEAR(wall_gradient(NodalField(m, u, u)), b, 1e-12 * (1.0 + std::abs(b)) / std::min(h1, h2));
  }
}

TEST(Export, ProfileRowsAndRoundTrip) {
  const auto dir = scratch_dir("profile");
  const AdaptiveRunReport r = run_adaptive(FlowParams::from_m(1.0), {});
  export_profile(r.final_field, dir / "profile.csv");
  const std::string text = slurp(dir / "profile.csv");
  EXPECT_EQ(text.rfind("eta,f,u\n", 0), 0u);
  EXPECT_EQ(line_count(text), r.final_mesh.node_count() + 1);
  const NodalField back = read_profile(dir / "profile.csv");
  EXPECT_EQ(back.mesh, r.final_mesh);
  EXPECT_EQ(back.f, r.final_field.f);
  EXPECT_EQ(back.u, r.final_field.u);
  EXPECT_EQ(back.u.front(), 0.0);
  EXPECT_EQ(back.u.back(), 1.0);
}

TEST(Export, IndicatorsFile) {
  const auto dir = scratch_dir("indicators");
  const Mesh1D m({0.0, 1.0, 3.0});
  KellyReport rep;
  rep.indicators = {0.0, 0.25};
  export_indicators(rep, m, 0, dir / "ind.csv");
  EXPECT_EQ(slurp(dir / "ind.csv"), "cell_center,h,indicator\n0.5,1,0\n2,2,0.25\n");
  rep.indicators = {1.0};
  EXPECT_THROW(export_indicators(rep, m, 0, dir / "bad.csv"), std::invalid_argument);
}

TEST(Export, IndicatorSumMatchesGlobal) {
  const auto dir = scratch_dir("indicator_sum");
  AmrConfig cfg;
  cfg.max_cycles = 4;
  const AdaptiveRunReport r = run_adaptive(FlowParams::from_m(0.5), cfg);
  const CycleEstimate& last = r.estimates.back();
  export_indicators(last.report, last.mesh, 3, dir / "ind.csv");
  std::istringstream in(slurp(dir / "ind.csv"));
  std::string line;
  std::getline(in, line);
  double s = 0.0;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    const double eta = parse_double(std::string_view(line).substr(line.rfind(',') + 1));
    s += eta * eta;
    ++rows;
  }
  EXPECT_EQ(rows, last.mesh.element_count());
  EXPECT_NEAR(std::sqrt(s), last.report.global, 1e-12 * last.report.global);
}

TEST(Export, ByteDeterministic) {
  const auto dir = scratch_dir("determinism");
  AmrConfig cfg;
  cfg.max_cycles = 6;
  export_profile(run_adaptive(FlowParams::from_m(1.0), cfg).final_field, dir / "a.csv");
  export_profile(run_adaptive(FlowParams::from_m(1.0), cfg).final_field, dir / "b.csv");
  EXPECT_EQ(slurp(dir / "a.csv"), slurp(dir / "b.csv"));
}

TEST(Export, UnwritablePathThrows) {
  const Mesh1D m = uniform_mesh(0.0, 1.0, 2);
  EXPECT_THROW(export_profile(NodalField(m, {0, 0, 0}, {0, 0, 0}), "/nonexistent-dir/x/profile.csv"),
               std::runtime_error);
}

TEST(Summary, JsonLayout) {
  AmrConfig cfg;
  cfg.max_cycles = 3;
  const FlowParams p = FlowParams::from_m(1.0);
  const AdaptiveRunReport r = run_adaptive(p, cfg);
  const RunSummary s = make_summary(p, r, 1.23258766);
  const auto j = nlohmann::json::parse(to_json(s).dump());
  EXPECT_EQ(j["params"]["m"], 1.0);
  EXPECT_EQ(j["params"]["beta"], 1.0);
  EXPECT_EQ(j["params"]["eta_inf"], 8.0);
  EXPECT_EQ(j["params"]["bc"], "wedge");
  ASSERT_EQ(j["cycles"].size(), 3u);
  for (const char* key : {"cycle", "dofs", "eta_global", "fpp0", "picard_iters"})
    EXPECT_TRUE(j["cycles"][0].contains(key)) << key;
  EXPECT_EQ(j["fpp0_final"], r.cycles.back().fpp0);
  EXPECT_EQ(j["oracle_alpha"], 1.23258766);
  EXPECT_DOUBLE_EQ(j["agreement"].get<double>(), std::abs(r.cycles.back().fpp0 - 1.23258766));
  EXPECT_EQ(j["terminated_by"], "MaxCycles");

  const auto none = nlohmann::json::parse(to_json(make_summary(p, r, std::nullopt)).dump());
  EXPECT_TRUE(none["oracle_alpha"].is_null());
  EXPECT_TRUE(none["agreement"].is_null());
}

TEST(Format, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(format_double(1.0), "1");
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> val(-1e6, 1e6);
  for (int k = 0; k < 1000; ++k) {
    const double v = val(rng);
    EXPECT_EQ(parse_double(format_double(v)), v);
  }
  EXPECT_THROW(parse_double("1.5x"), std::runtime_error);
}

}  // namespace
}  // namespace skanfem
