#pragma once

// Wall gradient extraction and CSV export of profiles and indicators.

#include <charconv>
#include <cstddef>
#include <fstream>
#include <filesystem>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "skanfem/kelly.hpp"
#include "skanfem/mesh.hpp"

namespace skanfem {

/// f''(0) = u'(0) from the one-sided three-point formula on the first three
/// (possibly unevenly spaced) nodes. Exact for quadratics.
inline double wall_gradient(const NodalField& field) {
  const Mesh1D& m = field.mesh;
  if (m.node_count() < 3) throw std::invalid_argument("wall_gradient needs at least three nodes");
  const double h1 = m.nodes()[1] - m.nodes()[0];
  const double h2 = m.nodes()[2] - m.nodes()[1];
  const double c0 = -(2.0 * h1 + h2) / (h1 * (h1 + h2));
  const double c1 = (h1 + h2) / (h1 * h2);
  const double c2 = -h1 / (h2 * (h1 + h2));
  return c0 * field.u[0] + c1 * field.u[1] + c2 * field.u[2];
}

/// Shortest round-trip decimal form; independent of the global locale.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  if (res.ec != std::errc{}) throw std::runtime_error("failed to format floating-point value");
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw std::runtime_error("malformed number '" + std::string(s) + "'");
  return v;
}

namespace detail {

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << content;
  out.flush();
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

}  // namespace detail

inline void export_profile(const NodalField& field, const std::filesystem::path& path) {
  std::string s = "eta,f,u\n";
  for (std::size_t i = 0; i < field.mesh.node_count(); ++i) {
    s += format_double(field.mesh.nodes()[i]);
    s += ',';
    s += format_double(field.f[i]);
    s += ',';
    s += format_double(field.u[i]);
    s += '\n';
  }
  detail::write_text_file(path, s);
}

/// Reads a file written by export_profile back into a field.
inline NodalField read_profile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
  std::string line;
  if (!std::getline(in, line) || line != "eta,f,u")
    throw std::runtime_error("'" + path.string() + "' is missing the eta,f,u header");
  std::vector<double> eta, f, u;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      throw std::runtime_error("malformed row in '" + path.string() + "': " + line);
    std::string_view sv(line);
    eta.push_back(parse_double(sv.substr(0, c1)));
    f.push_back(parse_double(sv.substr(c1 + 1, c2 - c1 - 1)));
    u.push_back(parse_double(sv.substr(c2 + 1)));
  }
  return NodalField(Mesh1D(std::move(eta)), std::move(f), std::move(u));
}

inline void export_indicators(const KellyReport& report, const Mesh1D& mesh, std::size_t /*cycle*/,
                              const std::filesystem::path& path) {
  if (report.indicators.size() != mesh.element_count())
    throw std::invalid_argument("indicator report does not match mesh");
  std::string s = "cell_center,h,indicator\n";
  for (std::size_t e = 0; e < mesh.element_count(); ++e) {
    s += format_double(mesh.center(e));
    s += ',';
    s += format_double(mesh.h(e));
    s += ',';
    s += format_double(report.indicators[e]);
    s += '\n';
  }
  detail::write_text_file(path, s);
}

}  // namespace skanfem
