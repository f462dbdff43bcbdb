#pragma once

// One-dimensional conforming meshes of linear (P1) elements and nodal
// fields (f, u) living on them.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace skanfem {

class Mesh1D {
 public:
  explicit Mesh1D(std::vector<double> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.size() < 2) throw std::invalid_argument("mesh needs at least two nodes");
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (!std::isfinite(nodes_[i])) throw std::invalid_argument("mesh node is not finite");
      if (i > 0 && !(nodes_[i] > nodes_[i - 1]))
        throw std::invalid_argument("mesh nodes must be strictly increasing (node " + std::to_string(i) + ")");
    }
  }

  std::span<const double> nodes() const noexcept { return nodes_; }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t element_count() const noexcept { return nodes_.size() - 1; }

  double a() const noexcept { return nodes_.front(); }
  double b() const noexcept { return nodes_.back(); }
  double left(std::size_t e) const { return nodes_[e]; }
  double right(std::size_t e) const { return nodes_[e + 1]; }
  double h(std::size_t e) const { return nodes_[e + 1] - nodes_[e]; }
  double center(std::size_t e) const { return 0.5 * (nodes_[e] + nodes_[e + 1]); }

  /// Element containing eta; the right endpoint belongs to the last element.
  std::size_t locate(double eta) const {
    if (eta < a() || eta > b())
      throw std::out_of_range("coordinate " + std::to_string(eta) + " outside mesh domain");
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), eta);
    auto idx = static_cast<std::size_t>(it - nodes_.begin());
    return std::min(idx == 0 ? 0 : idx - 1, element_count() - 1);
  }

  friend bool operator==(const Mesh1D&, const Mesh1D&) = default;

 private:
  std::vector<double> nodes_;
};

/// Piecewise-linear (f, u) pair sampled at mesh nodes; u approximates f'.
struct NodalField {
  NodalField(Mesh1D m, std::vector<double> f_vals, std::vector<double> u_vals)
      : mesh(std::move(m)), f(std::move(f_vals)), u(std::move(u_vals)) {
    if (f.size() != mesh.node_count() || u.size() != mesh.node_count())
      throw std::invalid_argument("nodal field size does not match mesh node count");
  }

  Mesh1D mesh;
  std::vector<double> f;
  std::vector<double> u;
};

/// Sorted, duplicate-free element indices.
struct RefinementFlags {
  std::vector<std::size_t> marked;

  bool empty() const noexcept { return marked.empty(); }
  std::size_t size() const noexcept { return marked.size(); }
  bool contains(std::size_t e) const { return std::binary_search(marked.begin(), marked.end(), e); }

  static RefinementFlags from(std::vector<std::size_t> idx) {
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    return RefinementFlags{std::move(idx)};
  }

  void validate(const Mesh1D& mesh) const {
    for (std::size_t i = 0; i < marked.size(); ++i) {
      if (marked[i] >= mesh.element_count())
        throw std::out_of_range("refinement flag " + std::to_string(marked[i]) + " out of range");
      if (i > 0 && marked[i] <= marked[i - 1])
        throw std::invalid_argument("refinement flags must be sorted and unique");
    }
  }
};

inline Mesh1D uniform_mesh(double a, double b, std::size_t n) {
  if (!(a < b)) throw std::invalid_argument("uniform_mesh requires a < b");
  if (n == 0) throw std::invalid_argument("uniform_mesh requires at least one element");
  std::vector<double> nodes(n + 1);
  const double h = (b - a) / static_cast<double>(n);
  for (std::size_t i = 0; i <= n; ++i) nodes[i] = a + h * static_cast<double>(i);
  nodes.back() = b;
  return Mesh1D(std::move(nodes));
}

/// Bisects every marked element.
inline Mesh1D refine(const Mesh1D& mesh, const RefinementFlags& flags) {
  flags.validate(mesh);
  std::vector<double> nodes;
  nodes.reserve(mesh.node_count() + flags.size());
  auto next = flags.marked.begin();
  for (std::size_t e = 0; e < mesh.element_count(); ++e) {
    nodes.push_back(mesh.left(e));
    if (next != flags.marked.end() && *next == e) {
      nodes.push_back(mesh.center(e));
      ++next;
    }
  }
  nodes.push_back(mesh.b());
  return Mesh1D(std::move(nodes));
}

struct FieldValue {
  double f;
  double u;
};

inline FieldValue eval(const NodalField& field, double eta) {
  const Mesh1D& m = field.mesh;
  const std::size_t e = m.locate(eta);
  const double t = (eta - m.left(e)) / m.h(e);
  if (t == 0.0) return {field.f[e], field.u[e]};
  if (t == 1.0) return {field.f[e + 1], field.u[e + 1]};
  return {(1.0 - t) * field.f[e] + t * field.f[e + 1], (1.0 - t) * field.u[e] + t * field.u[e + 1]};
}

/// Interpolates the piecewise-linear source field at the target nodes.
inline NodalField transfer(const NodalField& field, const Mesh1D& target) {
  const Mesh1D& src = field.mesh;
  const double tol = 1e-12 * std::max(1.0, std::abs(src.b() - src.a()));
  if (std::abs(src.a() - target.a()) > tol || std::abs(src.b() - target.b()) > tol)
    throw std::invalid_argument("transfer target does not span the source domain");
  std::vector<double> f(target.node_count()), u(target.node_count());
  for (std::size_t i = 0; i < target.node_count(); ++i) {
    const double eta = std::clamp(target.nodes()[i], src.a(), src.b());
    const FieldValue v = eval(field, eta);
    f[i] = v.f;
    u[i] = v.u;
  }
  return NodalField(target, std::move(f), std::move(u));
}

struct CoarsenResult {
  Mesh1D mesh;
  NodalField field;
  /// element_map[e] is the element of the coarsened mesh that contains old element e.
  std::vector<std::size_t> element_map;
};

/// Merges adjacent element pairs (scanned left to right, non-overlapping)
/// whose combined squared indicators fall below keep_threshold. Elements in
/// `protect` are never merged. Boundary nodes always survive, and nodal values
/// at surviving nodes are kept as they are.
inline CoarsenResult coarsen(const Mesh1D& mesh, const NodalField& field,
                             std::span<const double> indicators_sq, double keep_threshold,
                             const RefinementFlags& protect = {}) {
  if (mesh.element_count() < 2) throw std::invalid_argument("coarsen requires more than one element");
  if (indicators_sq.size() != mesh.element_count())
    throw std::invalid_argument("indicator count does not match element count");
  if (!(field.mesh == mesh)) throw std::invalid_argument("field is not defined on the mesh being coarsened");
  protect.validate(mesh);

  const std::size_t ne = mesh.element_count();
  std::vector<bool> drop_node(mesh.node_count(), false);
  for (std::size_t e = 0; e + 1 < ne;) {
    const bool eligible = !protect.contains(e) && !protect.contains(e + 1) &&
                          indicators_sq[e] + indicators_sq[e + 1] < keep_threshold;
    if (eligible) {
      drop_node[e + 1] = true;
      e += 2;
    } else {
      ++e;
    }
  }

  std::vector<double> nodes, f, u;
  std::vector<std::size_t> element_map(ne);
  std::size_t new_e = 0;
  for (std::size_t i = 0; i < mesh.node_count(); ++i) {
    if (drop_node[i]) continue;
    nodes.push_back(mesh.nodes()[i]);
    f.push_back(field.f[i]);
    u.push_back(field.u[i]);
  }
  for (std::size_t e = 0; e < ne; ++e) {
    element_map[e] = new_e;
    if (!drop_node[e + 1]) ++new_e;
  }
  Mesh1D coarse(std::move(nodes));
  NodalField coarse_field(coarse, std::move(f), std::move(u));
  return {std::move(coarse), std::move(coarse_field), std::move(element_map)};
}

}  // namespace skanfem
